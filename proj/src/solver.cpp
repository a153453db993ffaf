#include "catmip/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <string>

#include "catmip/errors.hpp"
#include "catmip/simplex.hpp"

namespace catmip {

namespace {

constexpr double kIntTol = 1e-6;

bool is_integral_number(double v) { return v == std::floor(v); }

struct Node {
  double bound = 0.0;  // inherited upper bound (max sense)
  int parent = -1;
  int col = -1;  // branched column; -1 for the root
  double nlo = 0.0, nhi = 0.0;
};

struct QueueEntry {
  double bound;
  long long id;
  bool operator<(const QueueEntry& o) const {
    if (bound != o.bound) return bound < o.bound;
    return id > o.id;  // oldest first among equal bounds
  }
};

class Tree {
 public:
  Tree(const MipModel& model, BoundedSimplex& lp)
      : model_(model), lp_(lp) {
    for (int j = 0; j < model.var_count(); ++j) {
      const VarDef& v = model.var({j});
      root_lo_.push_back(v.lo);
      root_hi_.push_back(v.hi);
      if (v.kind != VarKind::Continuous) int_cols_.push_back(j);
    }
  }

  const std::vector<int>& int_cols() const { return int_cols_; }

  void restore_root() {
    for (int col : touched_) {
      lp_.set_bounds(col, root_lo_[static_cast<std::size_t>(col)],
                     root_hi_[static_cast<std::size_t>(col)]);
    }
    touched_.clear();
  }

  // Tighten one column on top of whatever is applied (dive steps).
  void tighten(int col, double lo, double hi) {
    lp_.set_bounds(col, lo, hi);
    touched_.push_back(col);
  }

  // Replace the applied set with the bound chain of `id`.
  void apply(long long id, const std::vector<Node>& nodes) {
    restore_root();
    seen_.assign(root_lo_.size(), false);
    for (long long at = id; at >= 0; at = nodes[static_cast<std::size_t>(at)].parent) {
      const Node& n = nodes[static_cast<std::size_t>(at)];
      if (n.col < 0) continue;
      if (seen_[static_cast<std::size_t>(n.col)]) continue;  // child overrides
      seen_[static_cast<std::size_t>(n.col)] = true;
      tighten(n.col, n.nlo, n.nhi);
    }
  }

  std::pair<double, double> effective_bounds(int col) const {
    return lp_.bounds(col);
  }

 private:
  const MipModel& model_;
  BoundedSimplex& lp_;
  std::vector<double> root_lo_, root_hi_;
  std::vector<int> int_cols_;
  std::vector<int> touched_;
  std::vector<bool> seen_;
};

// Most fractional integer column, ties to the lowest id; -1 when integral.
int pick_fractional(const BoundedSimplex& lp, const std::vector<int>& cols) {
  int best = -1;
  double best_frac = kIntTol;
  for (int col : cols) {
    double v = lp.value(col);
    double frac = std::abs(v - std::round(v));
    if (frac > best_frac) {
      best_frac = frac;
      best = col;
    }
  }
  return best;
}

}  // namespace

std::optional<double> lp_relax(const MipModel& model,
                               const std::map<VarId, double>& fixings) {
  BoundedSimplex lp = make_relaxation(model);
  for (const auto& [v, val] : fixings) {
    const VarDef& def = model.var(v);
    if (val < def.lo - 1e-12 || val > def.hi + 1e-12) {
      throw Error("fixing for " + def.name + " lies outside its bounds");
    }
    lp.set_bounds(v.index, val, val);
  }
  auto out = lp.solve();
  if (out.status == BoundedSimplex::Status::Infeasible) return std::nullopt;
  return -out.objective + model.objective().constant();
}

Solution solve(const MipModel& model, const SolveOptions& options) {
  if (!model.frozen()) throw Error("solve requires a frozen model");
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  };

  Solution sol;
  const double obj_constant = model.objective().constant();

  bool integral_objective = is_integral_number(obj_constant);
  for (const auto& [v, a] : model.objective().terms()) {
    if (model.var(v).kind == VarKind::Continuous || !is_integral_number(a)) {
      integral_objective = false;
      break;
    }
  }
  const double prune_eps = integral_objective ? 1.0 - kIntTol : 1e-9;

  BoundedSimplex lp = make_relaxation(model);
  Tree tree(model, lp);

  bool have_inc = false;
  double inc_obj = 0.0;
  std::vector<double> inc_x;

  // Snap integers, verify, and fold into the incumbent.
  auto offer_incumbent = [&](double lp_obj_max) {
    std::vector<double> x(static_cast<std::size_t>(model.var_count()));
    for (int j = 0; j < model.var_count(); ++j) {
      double v = lp.value(j);
      if (model.var({j}).kind != VarKind::Continuous) v = std::round(v);
      x[static_cast<std::size_t>(j)] = v;
    }
    for (const Constraint& c : model.constraints()) {
      double lhs = c.expr.evaluate(x);
      bool ok = true;
      if (c.sense == Sense::Le) ok = lhs <= c.rhs + 1e-6;
      if (c.sense == Sense::Ge) ok = lhs >= c.rhs - 1e-6;
      if (c.sense == Sense::Eq) ok = std::abs(lhs - c.rhs) <= 1e-6;
      if (!ok) {
        throw Error("integral point violates constraint " + c.name +
                    "; numerical breakdown");
      }
    }
    double obj = model.objective().evaluate(x);
    (void)lp_obj_max;
    if (!have_inc || obj > inc_obj + 1e-9) {
      have_inc = true;
      inc_obj = obj;
      inc_x = std::move(x);
    } else if (std::abs(obj - inc_obj) <= 1e-9 &&
               std::lexicographical_compare(x.begin(), x.end(),
                                            inc_x.begin(), inc_x.end())) {
      inc_x = std::move(x);
    }
  };

  std::vector<Node> nodes;
  std::priority_queue<QueueEntry> queue;

  // root
  tree.restore_root();
  auto root_out = lp.solve();
  sol.stats.lp_iterations += root_out.iterations;
  sol.stats.nodes = 1;
  if (root_out.status == BoundedSimplex::Status::Infeasible) {
    sol.status = SolveStatus::Infeasible;
    sol.stats.wall_ms = elapsed_ms();
    return sol;
  }
  double root_bound = -root_out.objective + obj_constant;
  int root_frac = pick_fractional(lp, tree.int_cols());

  if (root_frac < 0) {
    offer_incumbent(root_bound);
    sol.status = SolveStatus::Optimal;
    sol.objective = inc_obj;
    sol.assignment = inc_x;
    sol.stats.wall_ms = elapsed_ms();
    return sol;
  }

  {
    // one greedy dive to seed the incumbent: round the most fractional
    // variable, repeat until integral or stuck
    int guard = static_cast<int>(tree.int_cols().size()) + 1;
    bool alive = true;
    int frac = root_frac;
    while (alive && guard-- > 0) {
      double v = std::round(lp.value(frac));
      auto [l, u] = tree.effective_bounds(frac);
      v = std::clamp(v, l, u);
      tree.tighten(frac, v, v);
      auto out = lp.solve();
      sol.stats.lp_iterations += out.iterations;
      if (out.status == BoundedSimplex::Status::Infeasible) {
        alive = false;
        break;
      }
      frac = pick_fractional(lp, tree.int_cols());
      if (frac < 0) {
        offer_incumbent(-out.objective + obj_constant);
        break;
      }
    }
  }

  nodes.push_back({root_bound, -1, -1, 0.0, 0.0});
  // re-solve the root to branch from its own relaxation
  tree.apply(0, nodes);
  auto out0 = lp.solve();
  sol.stats.lp_iterations += out0.iterations;
  {
    int frac = pick_fractional(lp, tree.int_cols());
    if (frac < 0) {
      // the warm re-solve landed on an integral vertex of equal value
      offer_incumbent(root_bound);
    } else {
      double x = lp.value(frac);
      auto [l, u] = tree.effective_bounds(frac);
      nodes.push_back({root_bound, 0, frac, l, std::floor(x)});
      queue.push({root_bound, 1});
      nodes.push_back({root_bound, 0, frac, std::ceil(x), u});
      queue.push({root_bound, 2});
    }
  }

  bool budget_hit = false;
  while (!queue.empty()) {
    if (sol.stats.nodes >= options.node_budget ||
        elapsed_ms() / 1000.0 >= options.time_budget_s) {
      budget_hit = true;
      break;
    }
    QueueEntry top = queue.top();
    queue.pop();
    if (have_inc && top.bound <= inc_obj + prune_eps) continue;

    ++sol.stats.nodes;
    tree.apply(top.id, nodes);
    auto out = lp.solve();
    sol.stats.lp_iterations += out.iterations;
    if (out.status == BoundedSimplex::Status::Infeasible) continue;
    double bound = -out.objective + obj_constant;
    if (have_inc && bound <= inc_obj + prune_eps) continue;

    int frac = pick_fractional(lp, tree.int_cols());
    if (frac < 0) {
      offer_incumbent(bound);
      continue;
    }
    double x = lp.value(frac);
    auto [l, u] = tree.effective_bounds(frac);
    long long id = static_cast<long long>(nodes.size());
    nodes.push_back({bound, static_cast<int>(top.id), frac, l, std::floor(x)});
    queue.push({bound, id});
    nodes.push_back({bound, static_cast<int>(top.id), frac, std::ceil(x), u});
    queue.push({bound, id + 1});
  }

  sol.stats.wall_ms = elapsed_ms();
  if (budget_hit) {
    sol.status = SolveStatus::BudgetExceeded;
  } else {
    sol.status = have_inc ? SolveStatus::Optimal : SolveStatus::Infeasible;
  }
  if (have_inc) {
    sol.objective = inc_obj;
    sol.assignment = inc_x;
  }
  return sol;
}

}  // namespace catmip
