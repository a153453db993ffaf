#pragma once

#include <string>
#include <vector>

#include "catmip/formula.hpp"
#include "catmip/world.hpp"

namespace catmip {

/* Reference semantics, evaluated directly on observation traces.  The
 * optimizer's encoding is checked against these definitions, never the
 * other way round.
 */

// Two-valued satisfaction degree: +1 satisfied, -1 violated.
struct SatisfactionValue {
  int value = 1;
  bool satisfied() const { return value > 0; }
  friend bool operator==(const SatisfactionValue&,
                         const SatisfactionValue&) = default;
};

struct PerformanceBreakdown {
  bool satisfied = false;
  int motion_cost = 0;
  double performance = 0.0;  // big_m * (satisfied ? 1 : -1) - motion_cost
  double big_m = 0.0;
};

// Default objective weight: 50 covers every horizon it can dominate; longer
// plans get horizon + 1 so satisfaction always outweighs motion.
double default_big_m(int t_p);

// One observation against one atom.  A negated label tests absence.  An
// omitted aug clause disables the collaboration route; an omitted limit
// clause never blocks it.  Callers pass atoms already simplified against the
// team roster so thresholds stay attainable.
bool eval_cat(const Observation& obs, const CatAtom& cat);

// Satisfaction of f at step k of the trace.  Throws Error when the trace is
// shorter than k + horizon(f).
SatisfactionValue rho(const Trace& trace, const FormulaPtr& f, int k);

// Non-self transitions of agent `agent_id` along the trajectory.
int motion_cost(const GroupTrajectory& traj, int agent_id);

// Satisfaction, motion cost, and combined score of one agent.  A big_m
// below the trajectory horizon cannot dominate worst-case motion; that is
// reported into `warnings` when a sink is given, never fatal.
PerformanceBreakdown performance(const Environment& env, const Team& team,
                                 const GroupTrajectory& traj,
                                 const FormulaPtr& f, int agent_id,
                                 double big_m,
                                 std::vector<std::string>* warnings = nullptr);

}  // namespace catmip
