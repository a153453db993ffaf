#include "catmip/semantics.hpp"

#include <algorithm>
#include <string>

#include "catmip/errors.hpp"

namespace catmip {

double default_big_m(int t_p) { return t_p <= 49 ? 50.0 : t_p + 1.0; }

bool eval_cat(const Observation& obs, const CatAtom& cat) {
  bool present = obs.labels.count(cat.target.label) > 0;
  if (cat.target.negated ? !present : present) return true;
  if (!cat.aug) return false;
  if (obs.count(cat.aug->capability) < cat.aug->threshold) return false;
  return !cat.limit ||
         obs.count(cat.limit->capability) < cat.limit->threshold;
}

namespace {

// Values stay in {-1, +1}; min/max implement and/or exactly.
int sat_rec(const Trace& trace, const FormulaPtr& f, int k) {
  switch (f->kind()) {
    case FormulaKind::True:
      return 1;
    case FormulaKind::Cat:
      return eval_cat(trace.obs[static_cast<std::size_t>(k)], f->atom()) ? 1
                                                                         : -1;
    case FormulaKind::Not:
      return -sat_rec(trace, f->child(), k);
    case FormulaKind::And:
      return std::min(sat_rec(trace, f->lhs(), k),
                      sat_rec(trace, f->rhs(), k));
    case FormulaKind::Or:
      return std::max(sat_rec(trace, f->lhs(), k),
                      sat_rec(trace, f->rhs(), k));
    case FormulaKind::Eventually: {
      int best = -1;
      for (int kp = k + f->window().lo; kp <= k + f->window().hi; ++kp) {
        best = std::max(best, sat_rec(trace, f->child(), kp));
      }
      return best;
    }
    case FormulaKind::Always: {
      int worst = 1;
      for (int kp = k + f->window().lo; kp <= k + f->window().hi; ++kp) {
        worst = std::min(worst, sat_rec(trace, f->child(), kp));
      }
      return worst;
    }
    case FormulaKind::Until: {
      // First argument must hold over [k, k'] with k' itself included.
      int best = -1;
      for (int kp = k + f->window().lo; kp <= k + f->window().hi; ++kp) {
        int v = sat_rec(trace, f->rhs(), kp);
        for (int kq = k; kq <= kp && v > -1; ++kq) {
          v = std::min(v, sat_rec(trace, f->lhs(), kq));
        }
        best = std::max(best, v);
      }
      return best;
    }
  }
  return -1;  // unreachable: switch covers FormulaKind
}

}  // namespace

SatisfactionValue rho(const Trace& trace, const FormulaPtr& f, int k) {
  if (k < 0) throw Error("evaluation step must be non-negative");
  int needed = k + horizon(f);
  if (needed > trace.horizon()) {
    throw Error("trace of horizon " + std::to_string(trace.horizon()) +
                " cannot evaluate a formula needing horizon " +
                std::to_string(needed));
  }
  return {sat_rec(trace, f, k)};
}

int motion_cost(const GroupTrajectory& traj, int agent_id) {
  int cost = 0;
  for (int k = 0; k < traj.horizon(); ++k) {
    if (traj.position(agent_id, k) != traj.position(agent_id, k + 1)) ++cost;
  }
  return cost;
}

PerformanceBreakdown performance(const Environment& env, const Team& team,
                                 const GroupTrajectory& traj,
                                 const FormulaPtr& f, int agent_id,
                                 double big_m,
                                 std::vector<std::string>* warnings) {
  if (warnings && big_m < traj.horizon()) {
    warnings->push_back(
        "big M " + std::to_string(big_m) + " is below the horizon " +
        std::to_string(traj.horizon()) +
        ": motion cost can outweigh task satisfaction");
  }
  Trace trace = trace_of(env, team, traj, agent_id);
  PerformanceBreakdown out;
  out.big_m = big_m;
  out.satisfied = rho(trace, f, 0).satisfied();
  out.motion_cost = motion_cost(traj, agent_id);
  out.performance = big_m * (out.satisfied ? 1.0 : -1.0) - out.motion_cost;
  return out;
}

}  // namespace catmip
