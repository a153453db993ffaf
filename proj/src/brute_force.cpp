#include "catmip/brute_force.hpp"

#include <algorithm>
#include <string>

#include "catmip/errors.hpp"
#include "catmip/semantics.hpp"

namespace catmip {

namespace {

struct Search {
  Search(const Environment& env, const Team& team,
         const std::vector<FormulaPtr>& specs, double big_m, long long budget,
         int t_p)
      : env(env), team(team), specs(specs), big_m(big_m), budget(budget),
        t_p(t_p) {}

  const Environment& env;
  const Team& team;
  const std::vector<FormulaPtr>& specs;
  double big_m;
  long long budget;
  int t_p;

  long long steps = 0;
  bool have_best = false;
  double best = 0.0;
  std::vector<std::vector<int>> rows;
  std::vector<int> spent_moves;  // per-agent J of the current prefix
  GroupTrajectory best_traj;

  void spend() {
    if (++steps > budget) {
      throw BudgetExceeded("exhaustive search exceeded " +
                           std::to_string(budget) +
                           " steps; shrink the instance");
    }
  }

  double leaf_objective() {
    GroupTrajectory traj{rows};
    double total = 0.0;
    for (int j = 1; j <= team.size(); ++j) {
      Trace tr = trace_of(env, team, traj, j);
      bool sat = rho(tr, specs[static_cast<std::size_t>(j - 1)], 0).satisfied();
      total += (sat ? big_m : -big_m) - spent_moves[static_cast<std::size_t>(j - 1)];
    }
    return total;
  }

  // rows holds times 0..k; grow until k == t_p.
  void extend(int k) {
    spend();
    if (k == t_p) {
      double obj = leaf_objective();
      if (!have_best || obj > best) {
        have_best = true;
        best = obj;
        best_traj.at = rows;
      }
      return;
    }
    double bound = 0.0;
    for (int j = 0; j < team.size(); ++j) {
      bound += big_m - spent_moves[static_cast<std::size_t>(j)];
    }
    if (have_best && bound <= best) return;  // cannot beat the incumbent
    std::vector<int> next(static_cast<std::size_t>(team.size()));
    choose(k, 0, next);
  }

  // Fill next[j..] with successor choices, ascending per agent so the full
  // walk is lexicographic.
  void choose(int k, int j, std::vector<int>& next) {
    if (j == team.size()) {
      // rows may reallocate on push_back: compare against a copy
      const std::vector<int> cur = rows[static_cast<std::size_t>(k)];
      for (int i = 0; i < team.size(); ++i) {
        if (cur[static_cast<std::size_t>(i)] != next[static_cast<std::size_t>(i)]) {
          ++spent_moves[static_cast<std::size_t>(i)];
        }
      }
      rows.push_back(next);
      extend(k + 1);
      rows.pop_back();
      for (int i = 0; i < team.size(); ++i) {
        if (cur[static_cast<std::size_t>(i)] != next[static_cast<std::size_t>(i)]) {
          --spent_moves[static_cast<std::size_t>(i)];
        }
      }
      return;
    }
    int here = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
    for (int q : env.successors(here)) {
      next[static_cast<std::size_t>(j)] = q;
      choose(k, j + 1, next);
    }
  }
};

}  // namespace

BruteForceResult brute_force_plan(const Environment& env, const Team& team,
                                  const std::vector<FormulaPtr>& specs,
                                  double big_m, long long budget) {
  if (static_cast<int>(specs.size()) != team.size()) {
    throw Error("need exactly one formula per agent: got " +
                std::to_string(specs.size()) + " for " +
                std::to_string(team.size()) + " agents");
  }
  int t_p = 0;
  for (const auto& f : specs) t_p = std::max(t_p, horizon(f));

  Search search{env, team, specs, big_m, budget, t_p};
  std::vector<int> starts;
  for (const auto& a : team.agents()) starts.push_back(a.start);
  search.rows.push_back(starts);
  search.spent_moves.assign(static_cast<std::size_t>(team.size()), 0);
  search.extend(0);

  BruteForceResult out;
  out.trajectory = std::move(search.best_traj);
  out.objective = search.best;
  out.steps = search.steps;
  return out;
}

}  // namespace catmip
