#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "catmip/model.hpp"

namespace catmip {

struct SolveOptions {
  double time_budget_s = 60.0;
  long long node_budget = 1'000'000;
  std::uint64_t seed = 0;  // reserved; the search itself is deterministic
};

enum class SolveStatus { Optimal, Infeasible, BudgetExceeded };

struct SolveStats {
  long long nodes = 0;
  long long lp_iterations = 0;
  double wall_ms = 0.0;
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;          // meaningful iff has_assignment()
  std::vector<double> assignment;  // indexed by VarId; empty if none found
  SolveStats stats;

  bool has_assignment() const { return !assignment.empty(); }
  double value(VarId v) const {
    return assignment.at(static_cast<std::size_t>(v.index));
  }
};

/* Exact 0-1/integer maximization by best-first branch and bound.
 *
 * Bounding is the LP relaxation (bounded-variable simplex, warm-started
 * across nodes); branching picks the integer variable farthest from
 * integrality, ties to the lowest id; nodes are explored highest bound
 * first, ties oldest first.  A single dive from the root seeds the
 * incumbent.  When every objective coefficient is integral the cutoff
 * tightens to incumbent + 1.  Among co-optimal incumbents encountered, the
 * lexicographically smallest assignment vector wins.
 *
 * Deterministic: identical model and options give identical objective,
 * status, and node count.  Returns status BudgetExceeded with the best
 * incumbent found (possibly none) once either budget is spent.
 */
Solution solve(const MipModel& model, const SolveOptions& options = {});

// Optimal value of the LP relaxation under optional variable fixings;
// nullopt when the relaxation is infeasible.  Fixings must lie within the
// variable's bounds.
std::optional<double> lp_relax(const MipModel& model,
                               const std::map<VarId, double>& fixings = {});

}  // namespace catmip
