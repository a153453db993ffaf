#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "catmip/formula.hpp"
#include "catmip/model.hpp"
#include "catmip/solver.hpp"
#include "catmip/world.hpp"

namespace catmip {

/* Compilation of (environment, team, per-agent formulas) into a 0-1 program.
 *
 * Motion is encoded as arrival variables: z_{j,(q,q'),k} = 1 means agent j
 * is on q' at step k, having come from q.  Step 0 pins the start node via
 * its self-loop; exactly one transition fires per agent and step; flow
 * conservation links consecutive steps.  Co-location indicators feed
 * capability counts, which drive the collaboration side of each atom; the
 * formula tree is unrolled over time into AND/OR gadgets on binary
 * satisfaction variables.  The objective sums, over agents,
 * M*(2*b_root - 1) minus the number of non-self-loop transitions taken.
 */

enum class ColocationMode {
  Compact,  // per-node occupancy products (default: tighter relaxation)
  Paper,    // node-index difference with an exact |x-y| linearization
};

struct EncodeOptions {
  ColocationMode colocation = ColocationMode::Compact;
  double big_m = 50.0;
  // Plan over a longer horizon than the formulas demand.  Rejected when it
  // is shorter than the specs' own horizon.
  std::optional<int> horizon_override;
};

struct VarMap {
  int horizon = 0;  // T_p actually encoded; trajectories have horizon+1 rows

  // (agent, from, to, k) -> transition variable, k = arrival instant
  std::map<std::tuple<int, int, int, int>, VarId> motion;
  // (agent, node, k) -> sum of in-edge transitions; 1 iff the agent is there
  std::map<std::tuple<int, int, int>, LinExpr> occupancy;
  // (agent a, agent b, k), a < b -> co-location indicator (symmetric, shared)
  std::map<std::tuple<int, int, int>, VarId> coloc;
  // (agent, capability, k) -> co-located holder count, excluding the agent
  std::map<std::tuple<int, std::string, int>, LinExpr> counts;

  struct CatParts {
    VarId sat;                 // the atom's satisfaction bit
    VarId label;               // label-membership bit
    std::optional<VarId> aug;  // collaboration threshold met
    std::optional<VarId> al;   // availability not limited
  };
  // (agent, canonical atom text, k)
  std::map<std::tuple<int, std::string, int>, CatParts> cat_parts;

  // (agent, canonical subformula text, k) -> satisfaction bit
  std::map<std::tuple<int, std::string, int>, VarId> sat;
  // per agent (index id-1): satisfaction bit of the whole spec at k = 0
  std::vector<VarId> roots;
};

struct EncodeResult {
  MipModel model;  // frozen
  VarMap map;
  std::vector<std::string> warnings;
};

// Specs are normalized and per-agent-simplified internally (both idempotent),
// so callers may pass formulas as parsed.  Throws Error on agent/spec count
// mismatch, non-positive M, or an override below the specs' horizon.
EncodeResult encode(const Environment& env, const Team& team,
                    const std::vector<FormulaPtr>& specs,
                    const EncodeOptions& opts = {});

struct AgentReport {
  int agent_id = 0;
  bool satisfied = false;
  int motion_cost = 0;
  double performance = 0.0;
};

struct PlanReport {
  SolveStatus status = SolveStatus::Infeasible;
  GroupTrajectory trajectory;
  std::vector<AgentReport> agents;
  int satisfied_count = 0;
  int total_motion = 0;
  double total_performance = 0.0;
  double objective = 0.0;  // solver objective, for cross-checking
  SolveStats stats;
  // every disagreement between the model's satisfaction/cost variables and
  // the trace semantics of the decoded trajectory; must stay empty
  std::vector<std::string> mismatches;
  std::vector<std::string> warnings;

  bool consistent() const { return mismatches.empty(); }
};

// Reads the trajectory out of a solved model and re-derives every reported
// quantity through the trace semantics, flagging any disagreement with the
// model's own variables.  Requires an assignment (optimal or the incumbent
// of a budget-cut run).
PlanReport decode(const Solution& solution, const VarMap& map,
                  const Environment& env, const Team& team,
                  const std::vector<FormulaPtr>& specs, double big_m);

}  // namespace catmip
