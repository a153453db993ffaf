#pragma once

#include <vector>

#include "catmip/formula.hpp"
#include "catmip/world.hpp"

namespace catmip {

struct BruteForceResult {
  GroupTrajectory trajectory;  // lexicographically smallest optimum
  double objective = 0.0;      // sum of per-agent performances
  long long steps = 0;         // search nodes visited
};

// Exhaustive reference planner.  Enumerates every edge-respecting group
// trajectory over T_p = max_j horizon(specs[j]) depth-first in
// lexicographic order (time-major, then agent id), pruning subtrees whose
// optimistic completion (every agent satisfied, no further moves) cannot
// beat the incumbent.  Pruning never changes the returned optimum or the
// returned trajectory.
//
// Only for tiny instances: the space is |Q|^(N * T_p).  Throws
// BudgetExceeded once `budget` search steps are spent.
BruteForceResult brute_force_plan(const Environment& env, const Team& team,
                                  const std::vector<FormulaPtr>& specs,
                                  double big_m,
                                  long long budget = 10'000'000);

}  // namespace catmip
