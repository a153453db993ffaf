#include "catmip/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "catmip/errors.hpp"

namespace catmip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kRefactorEvery = 64;
constexpr int kDegenerateStreak = 200;
constexpr double kBoundPerturb = 1e-4;

}  // namespace

struct BoundedSimplex::Impl {
  int m = 0;       // rows
  int n_all = 0;   // structural + slack columns
  int n_struct = 0;

  std::vector<std::vector<std::pair<int, double>>> cols;
  std::vector<double> cost;  // structural costs; slacks cost 0
  std::vector<double> lo, hi;
  std::vector<double> rhs;

  // basis state
  enum State : unsigned char { AtLo, AtUp, InBasis };
  std::vector<State> state;
  std::vector<int> basis;   // column per row
  std::vector<int> row_of;  // row per column, -1 if nonbasic
  std::vector<double> x;

  // factorized basis + eta updates since the last refactor
  // mutable: SparseLU::transpose() is non-const in Eigen 3.4 even though
  // solving does not modify the factorization
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  struct Eta {
    int row;
    double pivot;
    std::vector<std::pair<int, double>> rest;  // alpha entries, pivot row excluded
  };
  std::vector<Eta> etas;
  bool factor_valid = false;
  bool bland = false;
  int degenerate_run = 0;
  long long iterations_total = 0;
  double refactor_seconds = 0.0;
  long long refactor_calls = 0;

  // scratch
  Eigen::VectorXd work;

  void refactor() {
    if (m == 0) {  // Eigen's SparseLU divides by zero on a 0x0 matrix
      etas.clear();
      factor_valid = true;
      return;
    }
    auto t0 = std::chrono::steady_clock::now();
    Eigen::SparseMatrix<double> B(m, m);
    std::vector<Eigen::Triplet<double>> trip;
    for (int r = 0; r < m; ++r) {
      for (const auto& [i, a] : cols[static_cast<std::size_t>(basis[r])]) {
        trip.emplace_back(i, r, a);
      }
    }
    B.setFromTriplets(trip.begin(), trip.end());
    lu.compute(B);
    if (lu.info() != Eigen::Success) {
      throw Error("basis factorization failed; model is numerically degenerate");
    }
    etas.clear();
    factor_valid = true;
    refactor_seconds += std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    ++refactor_calls;
  }

  // w := B^{-1} w
  void ftran(Eigen::VectorXd& w) const {
    if (m == 0) return;
    w = lu.solve(w);
    for (const Eta& e : etas) {
      double piv = w[e.row] / e.pivot;
      if (piv != 0.0) {
        for (const auto& [i, a] : e.rest) w[i] -= a * piv;
      }
      w[e.row] = piv;
    }
  }

  // w := B^{-T} w
  void btran(Eigen::VectorXd& w) const {
    if (m == 0) return;
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      double acc = w[it->row];
      for (const auto& [i, a] : it->rest) acc -= a * w[i];
      w[it->row] = acc / it->pivot;
    }
    w = lu.transpose().solve(w);
  }

  void column_into(int j, Eigen::VectorXd& w) const {
    w.setZero(m);
    for (const auto& [i, a] : cols[static_cast<std::size_t>(j)]) w[i] = a;
  }

  // Recompute basic values from scratch: x_B = B^{-1}(b - A_N x_N).
  void recompute_basics() {
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i) r[i] = rhs[static_cast<std::size_t>(i)];
    for (int j = 0; j < n_all; ++j) {
      if (state[static_cast<std::size_t>(j)] == InBasis) continue;
      double v = x[static_cast<std::size_t>(j)];
      if (v == 0.0) continue;
      for (const auto& [i, a] : cols[static_cast<std::size_t>(j)]) r[i] -= a * v;
    }
    ftran(r);
    for (int i = 0; i < m; ++i) x[static_cast<std::size_t>(basis[i])] = r[i];
  }

  double viol(int j) const {
    double v = x[static_cast<std::size_t>(j)];
    if (v < lo[static_cast<std::size_t>(j)] - kFeasTol) {
      return lo[static_cast<std::size_t>(j)] - v;
    }
    if (v > hi[static_cast<std::size_t>(j)] + kFeasTol) {
      return v - hi[static_cast<std::size_t>(j)];
    }
    return 0.0;
  }

  bool any_infeasible() const {
    for (int r = 0; r < m; ++r) {
      if (viol(basis[r]) > 0.0) return true;
    }
    return false;
  }

  double total_viol() const {
    double f = 0.0;
    for (int r = 0; r < m; ++r) f += viol(basis[r]);
    return f;
  }

  // anti-degeneracy bound spreading; lo_true/hi_true hold the real bounds
  // while it is active
  std::vector<double> lo_true, hi_true;
  bool perturbed = false;

  bool perturbed_bounds() const { return perturbed; }

  void perturb_bounds() {
    if (perturbed) return;
    lo_true = lo;
    hi_true = hi;
    for (int j = 0; j < n_all; ++j) {
      // structural columns pinned by fixings or branching stay pinned
      if (j < n_struct &&
          lo[static_cast<std::size_t>(j)] == hi[static_cast<std::size_t>(j)]) {
        continue;
      }
      std::uint64_t h =
          (static_cast<std::uint64_t>(j) + 1) * 0x9E3779B97F4A7C15ull;
      double u1 = static_cast<double>((h >> 16) & 0xFFFFFF) / 16777216.0;
      double u2 = static_cast<double>((h >> 40) & 0xFFFFFF) / 16777216.0;
      if (std::isfinite(lo[static_cast<std::size_t>(j)])) {
        lo[static_cast<std::size_t>(j)] -= kBoundPerturb * (0.5 + u1);
      }
      if (std::isfinite(hi[static_cast<std::size_t>(j)])) {
        hi[static_cast<std::size_t>(j)] += kBoundPerturb * (0.5 + u2);
      }
    }
    perturbed = true;
  }

  void unperturb() {
    if (!perturbed) return;
    lo = std::move(lo_true);
    hi = std::move(hi_true);
    lo_true.clear();
    hi_true.clear();
    perturbed = false;
  }

  // Once an optimum has been reached, reduced costs stay feasible under any
  // later bound change, so re-solves can run dual pivots: pick a basic
  // outside its bounds, drive it onto the violated bound, and let the dual
  // ratio test keep the reduced costs sound.  Far cheaper after branching
  // than repairing from scratch.
  bool dual_ready = false;

  // one dual pivot; 1 = pivoted or flipped, 0 = primal feasible (optimal),
  // -1 = a violated row with no admissible column (primal infeasible)
  int dual_iterate() {
    int lrow = -1;
    double worst = 0.0;
    for (int r = 0; r < m; ++r) {
      double v = viol(basis[r]);
      if (v > worst) {
        worst = v;
        lrow = r;
      }
    }
    if (lrow < 0) return 0;
    int leave = basis[lrow];
    bool below =
        x[static_cast<std::size_t>(leave)] < lo[static_cast<std::size_t>(leave)];
    double target = below ? lo[static_cast<std::size_t>(leave)]
                          : hi[static_cast<std::size_t>(leave)];

    Eigen::VectorXd er = Eigen::VectorXd::Zero(m);
    er[lrow] = 1.0;
    btran(er);
    Eigen::VectorXd yc(m);
    for (int r = 0; r < m; ++r) {
      int j = basis[r];
      yc[r] = j < n_struct ? cost[static_cast<std::size_t>(j)] : 0.0;
    }
    btran(yc);

    int enter = -1;
    double best_ratio = kInf;
    for (int j = 0; j < n_all; ++j) {
      State st = state[static_cast<std::size_t>(j)];
      if (st == InBasis) continue;
      if (lo[static_cast<std::size_t>(j)] == hi[static_cast<std::size_t>(j)]) continue;
      double arj = 0.0;
      double d = j < n_struct ? cost[static_cast<std::size_t>(j)] : 0.0;
      for (const auto& [i, a] : cols[static_cast<std::size_t>(j)]) {
        arj += a * er[i];
        d -= a * yc[i];
      }
      if (std::abs(arj) <= kPivotTol) continue;
      // admissible: the entering move must push the leaving basic toward the
      // violated bound without leaving its own bound the wrong way
      bool ok;
      if (below) {
        ok = (st == AtLo && arj < 0.0) || (st == AtUp && arj > 0.0);
      } else {
        ok = (st == AtLo && arj > 0.0) || (st == AtUp && arj < 0.0);
      }
      if (!ok) continue;
      double ratio = std::abs(d) / std::abs(arj);
      if (ratio < best_ratio - kPivotTol ||
          (ratio < best_ratio + kPivotTol && (enter < 0 || j < enter))) {
        best_ratio = std::min(best_ratio, ratio);
        enter = j;
      }
    }
    if (enter < 0) return -1;

    Eigen::VectorXd alpha(m);
    column_into(enter, alpha);
    ftran(alpha);
    double arj = alpha[lrow];
    if (std::abs(arj) <= kPivotTol) {
      // factored row disagrees with the priced row: refresh and retry
      refactor();
      recompute_basics();
      return 1;
    }
    double t = (x[static_cast<std::size_t>(leave)] - target) / arj;
    double range = hi[static_cast<std::size_t>(enter)] -
                   lo[static_cast<std::size_t>(enter)];
    if (std::abs(t) > range + kPivotTol) {
      // entering column hits its other bound first: flip it, keep the basis
      double step = t > 0.0 ? range : -range;
      for (int r = 0; r < m; ++r) {
        if (alpha[r] != 0.0) {
          x[static_cast<std::size_t>(basis[r])] -= alpha[r] * step;
        }
      }
      state[static_cast<std::size_t>(enter)] =
          state[static_cast<std::size_t>(enter)] == AtLo ? AtUp : AtLo;
      x[static_cast<std::size_t>(enter)] =
          state[static_cast<std::size_t>(enter)] == AtLo
              ? lo[static_cast<std::size_t>(enter)]
              : hi[static_cast<std::size_t>(enter)];
      return 1;
    }

    for (int r = 0; r < m; ++r) {
      if (alpha[r] != 0.0) {
        x[static_cast<std::size_t>(basis[r])] -= alpha[r] * t;
      }
    }
    x[static_cast<std::size_t>(enter)] += t;
    state[static_cast<std::size_t>(leave)] = below ? AtLo : AtUp;
    x[static_cast<std::size_t>(leave)] = target;
    row_of[static_cast<std::size_t>(leave)] = -1;
    basis[lrow] = enter;
    row_of[static_cast<std::size_t>(enter)] = lrow;
    state[static_cast<std::size_t>(enter)] = InBasis;

    Eta eta;
    eta.row = lrow;
    eta.pivot = arj;
    for (int r = 0; r < m; ++r) {
      if (r != lrow && alpha[r] != 0.0) eta.rest.emplace_back(r, alpha[r]);
    }
    etas.push_back(std::move(eta));
    if (static_cast<int>(etas.size()) >= kRefactorEvery) {
      refactor();
      recompute_basics();
    }
    return 1;
  }

  // One simplex phase: repair = minimize total bound violation of basics,
  // otherwise minimize `cost`.  Returns false when no improving column
  // exists (phase optimum reached).
  bool iterate(bool repair) {
    // dual values for the phase objective
    Eigen::VectorXd y(m);
    if (repair) {
      for (int r = 0; r < m; ++r) {
        int j = basis[r];
        double v = x[static_cast<std::size_t>(j)];
        if (v < lo[static_cast<std::size_t>(j)] - kFeasTol) {
          y[r] = -1.0;
        } else if (v > hi[static_cast<std::size_t>(j)] + kFeasTol) {
          y[r] = 1.0;
        } else {
          y[r] = 0.0;
        }
      }
    } else {
      for (int r = 0; r < m; ++r) {
        int j = basis[r];
        y[r] = j < n_struct ? cost[static_cast<std::size_t>(j)] : 0.0;
      }
    }
    btran(y);

    // pricing
    int enter = -1;
    double best_score = kPivotTol;
    int dir = 0;
    for (int j = 0; j < n_all; ++j) {
      State s = state[static_cast<std::size_t>(j)];
      if (s == InBasis) continue;
      if (lo[static_cast<std::size_t>(j)] == hi[static_cast<std::size_t>(j)]) continue;
      double d = repair || j >= n_struct ? 0.0 : cost[static_cast<std::size_t>(j)];
      for (const auto& [i, a] : cols[static_cast<std::size_t>(j)]) d -= a * y[i];
      double score = 0.0;
      if (s == AtLo && d < -kPivotTol) score = -d;
      if (s == AtUp && d > kPivotTol) score = d;
      if (score <= 0.0) continue;
      if (bland) {  // first eligible index
        enter = j;
        dir = s == AtLo ? 1 : -1;
        break;
      }
      if (score > best_score) {
        best_score = score;
        enter = j;
        dir = s == AtLo ? 1 : -1;
      }
    }
    if (enter < 0) return false;

    // direction through the basis
    Eigen::VectorXd alpha(m);
    column_into(enter, alpha);
    ftran(alpha);

    // ratio test: smallest step that hits a bound
    double best_t = hi[static_cast<std::size_t>(enter)] - lo[static_cast<std::size_t>(enter)];
    int leave_row = -1;  // -1: entering flips to its other bound
    double leave_alpha = 0.0;
    if (repair && !bland) {
      // piecewise ratio test: total violation is convex piecewise linear in
      // the step, so keep going past breakpoints while its slope is still
      // negative; one pivot can then repair several rows at once instead of
      // stalling at the first degenerate bound
      struct Breakpoint {
        double t;
        double inc;
        int row;
      };
      std::vector<Breakpoint> bps;
      for (int r = 0; r < m; ++r) {
        double a = dir * alpha[r];
        if (std::abs(a) <= kPivotTol) continue;
        int j = basis[r];
        double v = x[static_cast<std::size_t>(j)];
        double l = lo[static_cast<std::size_t>(j)];
        double u = hi[static_cast<std::size_t>(j)];
        if (a > 0.0) {  // basic value moves down
          if (v > u + kFeasTol) {
            bps.push_back({(v - u) / a, a, r});
            if (l != -kInf) bps.push_back({(v - l) / a, a, r});
          } else if (v >= l - kFeasTol) {
            if (l != -kInf) bps.push_back({std::max(0.0, (v - l) / a), a, r});
          }
          // already below its lower bound: moving down only worsens, and the
          // current slope accounts for that
        } else {  // basic value moves up
          if (v < l - kFeasTol) {
            bps.push_back({(l - v) / -a, -a, r});
            if (u != kInf) bps.push_back({(u - v) / -a, -a, r});
          } else if (v <= u + kFeasTol) {
            if (u != kInf) bps.push_back({std::max(0.0, (u - v) / -a), -a, r});
          }
        }
      }
      std::sort(bps.begin(), bps.end(),
                [&](const Breakpoint& p, const Breakpoint& q) {
                  if (p.t != q.t) return p.t < q.t;
                  return basis[p.row] < basis[q.row];
                });
      double slope = -best_score;
      double cap = best_t;  // entering variable's own range
      bool flipped = true;
      int last_bp = -1;
      for (std::size_t b = 0; b < bps.size(); ++b) {
        const Breakpoint& bp = bps[b];
        if (bp.t >= cap) break;
        slope += bp.inc;
        last_bp = static_cast<int>(b);
        // traverse segments where total violation is flat: stopping inside a
        // plateau would just shuffle basis columns without progress
        if (slope >= kPivotTol) {
          leave_row = bp.row;
          best_t = bp.t;
          leave_alpha = dir * alpha[bp.row];
          flipped = false;
          break;
        }
      }
      if (flipped && cap == kInf) {
        // slope never turned positive before running out of breakpoints;
        // stop at the last one rather than walking off to infinity
        if (last_bp < 0) {
          throw Error("LP repair phase is unbounded; model is ill-posed");
        }
        leave_row = bps[static_cast<std::size_t>(last_bp)].row;
        best_t = bps[static_cast<std::size_t>(last_bp)].t;
        leave_alpha = dir * alpha[leave_row];
        flipped = false;
      }
    } else {
      for (int r = 0; r < m; ++r) {
        double a = dir * alpha[r];
        if (std::abs(a) <= kPivotTol) continue;
        int j = basis[r];
        double v = x[static_cast<std::size_t>(j)];
        double l = lo[static_cast<std::size_t>(j)];
        double u = hi[static_cast<std::size_t>(j)];
        double t;
        if (a > 0.0) {
          // basic value moves down, stops at its lower bound; a basic already
          // above its upper bound stops as soon as it becomes feasible
          double target = repair && v > u + kFeasTol ? u : l;
          if (target == -kInf) continue;
          if (repair && v < l - kFeasTol) continue;  // moving deeper is unblocked
          t = (v - target) / a;
        } else {
          double target = repair && v < l - kFeasTol ? l : u;
          if (target == kInf) continue;
          if (repair && v > u + kFeasTol) continue;
          t = (v - target) / a;
        }
        if (t < 0.0) t = 0.0;
        bool take = false;
        if (t < best_t - kPivotTol) {
          take = true;
        } else if (t < best_t + kPivotTol) {
          // tie: normally keep the largest pivot for stability; under Bland the
          // leaving choice must be lowest-index too, or step-0 pivots can cycle
          int cur = leave_row < 0 ? enter : basis[leave_row];
          take = bland ? j < cur
                       : (leave_row < 0 || std::abs(a) > std::abs(leave_alpha));
        }
        if (take) {
          best_t = std::min(best_t, t);
          leave_row = r;
          leave_alpha = dir * alpha[r];
        }
      }
    }

    if (leave_row < 0 && best_t == kInf) {
      throw Error("LP relaxation is unbounded");
    }

    if (best_t <= kPivotTol) {
      ++degenerate_run;
    } else {
      // real movement: the cycling danger has passed, go back to fast pricing
      degenerate_run = 0;
      bland = false;
    }
    if (degenerate_run > kDegenerateStreak) bland = true;

    // apply the step
    double step = dir * best_t;
    if (step != 0.0) {
      for (int r = 0; r < m; ++r) {
        if (alpha[r] != 0.0) {
          x[static_cast<std::size_t>(basis[r])] -= alpha[r] * step;
        }
      }
      x[static_cast<std::size_t>(enter)] += step;
    }

    if (leave_row < 0) {
      // bound flip, basis unchanged
      state[static_cast<std::size_t>(enter)] = dir > 0 ? AtUp : AtLo;
      x[static_cast<std::size_t>(enter)] =
          dir > 0 ? hi[static_cast<std::size_t>(enter)] : lo[static_cast<std::size_t>(enter)];
      return true;
    }

    int leave = basis[leave_row];
    double lv = x[static_cast<std::size_t>(leave)];
    // snap the leaving variable onto the bound it reached
    if (std::abs(lv - lo[static_cast<std::size_t>(leave)]) <=
        std::abs(lv - hi[static_cast<std::size_t>(leave)])) {
      state[static_cast<std::size_t>(leave)] = AtLo;
      x[static_cast<std::size_t>(leave)] = lo[static_cast<std::size_t>(leave)];
    } else {
      state[static_cast<std::size_t>(leave)] = AtUp;
      x[static_cast<std::size_t>(leave)] = hi[static_cast<std::size_t>(leave)];
    }
    row_of[static_cast<std::size_t>(leave)] = -1;
    basis[leave_row] = enter;
    row_of[static_cast<std::size_t>(enter)] = leave_row;
    state[static_cast<std::size_t>(enter)] = InBasis;

    Eta eta;
    eta.row = leave_row;
    eta.pivot = alpha[leave_row];
    for (int r = 0; r < m; ++r) {
      if (r != leave_row && alpha[r] != 0.0) eta.rest.emplace_back(r, alpha[r]);
    }
    etas.push_back(std::move(eta));
    if (static_cast<int>(etas.size()) >= kRefactorEvery) {
      refactor();
      recompute_basics();
    }
    return true;
  }
};

BoundedSimplex::BoundedSimplex(
    int n_rows, std::vector<std::vector<std::pair<int, double>>> columns,
    std::vector<double> cost, std::vector<double> lo, std::vector<double> hi,
    std::vector<Sense> row_sense, std::vector<double> rhs)
    : n_structural_(static_cast<int>(columns.size())),
      impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  s.m = n_rows;
  s.n_struct = n_structural_;
  s.n_all = s.n_struct + n_rows;
  s.cost = std::move(cost);
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  s.rhs = std::move(rhs);
  s.cols = std::move(columns);

  if (static_cast<int>(s.cost.size()) != s.n_struct ||
      static_cast<int>(s.lo.size()) != s.n_struct ||
      static_cast<int>(s.hi.size()) != s.n_struct ||
      static_cast<int>(row_sense.size()) != n_rows ||
      static_cast<int>(s.rhs.size()) != n_rows) {
    throw Error("inconsistent LP dimensions");
  }

  // normalize >= rows to <= by negation, then append slack columns
  std::vector<bool> flip(static_cast<std::size_t>(n_rows), false);
  for (int r = 0; r < n_rows; ++r) {
    if (row_sense[static_cast<std::size_t>(r)] == Sense::Ge) {
      flip[static_cast<std::size_t>(r)] = true;
      s.rhs[static_cast<std::size_t>(r)] = -s.rhs[static_cast<std::size_t>(r)];
      row_sense[static_cast<std::size_t>(r)] = Sense::Le;
    }
  }
  for (auto& col : s.cols) {
    for (auto& [i, a] : col) {
      if (flip[static_cast<std::size_t>(i)]) a = -a;
    }
  }
  for (int r = 0; r < n_rows; ++r) {
    s.cols.push_back({{r, 1.0}});
    s.lo.push_back(0.0);
    s.hi.push_back(row_sense[static_cast<std::size_t>(r)] == Sense::Eq ? 0.0 : kInf);
  }

  s.state.assign(static_cast<std::size_t>(s.n_all), Impl::AtLo);
  s.row_of.assign(static_cast<std::size_t>(s.n_all), -1);
  s.x.assign(static_cast<std::size_t>(s.n_all), 0.0);
  s.basis.resize(static_cast<std::size_t>(n_rows));
  for (int r = 0; r < n_rows; ++r) {
    int j = s.n_struct + r;
    s.basis[static_cast<std::size_t>(r)] = j;
    s.state[static_cast<std::size_t>(j)] = Impl::InBasis;
    s.row_of[static_cast<std::size_t>(j)] = r;
  }
}

BoundedSimplex::~BoundedSimplex() = default;
BoundedSimplex::BoundedSimplex(BoundedSimplex&&) noexcept = default;
BoundedSimplex& BoundedSimplex::operator=(BoundedSimplex&&) noexcept = default;

void BoundedSimplex::set_bounds(int col, double new_lo, double new_hi) {
  Impl& s = *impl_;
  s.unperturb();
  if (col < 0 || col >= s.n_struct) throw Error("bound change on unknown column");
  if (!(new_lo <= new_hi)) throw Error("bound change with lo > hi");
  s.lo[static_cast<std::size_t>(col)] = new_lo;
  s.hi[static_cast<std::size_t>(col)] = new_hi;
}

std::pair<double, double> BoundedSimplex::bounds(int col) const {
  const Impl& s = *impl_;
  return {s.lo.at(static_cast<std::size_t>(col)), s.hi.at(static_cast<std::size_t>(col))};
}

double BoundedSimplex::value(int col) const {
  return impl_->x.at(static_cast<std::size_t>(col));
}

BoundedSimplex::Outcome BoundedSimplex::solve() {
  Impl& s = *impl_;
  s.unperturb();  // an aborted earlier call may have left spread bounds

  // bounds may have moved since the last call: re-pin nonbasic variables
  for (int j = 0; j < s.n_all; ++j) {
    switch (s.state[static_cast<std::size_t>(j)]) {
      case Impl::AtLo:
        s.x[static_cast<std::size_t>(j)] = s.lo[static_cast<std::size_t>(j)];
        break;
      case Impl::AtUp:
        s.x[static_cast<std::size_t>(j)] =
            std::isfinite(s.hi[static_cast<std::size_t>(j)])
                ? s.hi[static_cast<std::size_t>(j)]
                : s.lo[static_cast<std::size_t>(j)];
        break;
      case Impl::InBasis:
        break;
    }
    if (s.state[static_cast<std::size_t>(j)] == Impl::AtUp &&
        !std::isfinite(s.hi[static_cast<std::size_t>(j)])) {
      s.state[static_cast<std::size_t>(j)] = Impl::AtLo;
    }
  }
  // bound changes never touch B itself, so an existing factorization (plus
  // its eta file) stays valid across solves; only the values move
  if (!s.factor_valid) s.refactor();
  s.recompute_basics();
  s.bland = false;
  s.degenerate_run = 0;

  Outcome out;
  long long iter_cap =
      10000 + 200LL * (static_cast<long long>(s.n_all) + s.m);

  // set CATMIP_SIMPLEX_TRACE to a print interval to watch long solves on stderr
  static const long long trace_every = [] {
    const char* e = std::getenv("CATMIP_SIMPLEX_TRACE");
    if (!e) return 0LL;
    long long v = std::atoll(e);
    return v > 0 ? v : 4096LL;
  }();
  auto trace_tick = [&](const char* phase) {
    if (trace_every == 0 || out.iterations % trace_every != 0) return;
    int infeas = 0;
    double virt = 0.0;
    for (int r = 0; r < s.m; ++r) {
      double v = s.viol(s.basis[r]);
      if (v > 0.0) {
        ++infeas;
        virt += v;
      }
    }
    double obj = 0.0;
    for (int j = 0; j < s.n_struct; ++j) {
      obj += s.cost[static_cast<std::size_t>(j)] * s.x[static_cast<std::size_t>(j)];
    }
    std::fprintf(stderr,
                 "[simplex] %s iter %lld infeas %d (sum %.3g) obj %.8g bland %d "
                 "degen %d refactor %lldx %.2fs\n",
                 phase, out.iterations, infeas, virt, obj,
                 static_cast<int>(s.bland), s.degenerate_run, s.refactor_calls,
                 s.refactor_seconds);
    if (infeas > 0 && infeas <= 4) {
      for (int r = 0; r < s.m; ++r) {
        int j = s.basis[r];
        double v = s.viol(j);
        if (v > 0.0) {
          std::fprintf(stderr,
                       "[simplex]   row %d basic col %d (struct %d) x %.6g "
                       "bounds [%g, %g]\n",
                       r, j, j < s.n_struct ? j : -1,
                       s.x[static_cast<std::size_t>(j)],
                       s.lo[static_cast<std::size_t>(j)],
                       s.hi[static_cast<std::size_t>(j)]);
        }
      }
    }
  };

  // repair: drive every basic variable inside its bounds; false = infeasible
  auto run_repair = [&](const char* tag) -> bool {
    double f_prev = kInf;
    int stall = 0;
    for (;;) {
      double f = s.total_viol();
      if (f <= 0.0) return true;
      if (f < f_prev - kFeasTol) {
        f_prev = f;
        stall = 0;
      } else if (++stall > kDegenerateStreak) {
        // violation swaps between rows without shrinking; fall back to the
        // safe rule until it moves again
        s.bland = true;
      }
      if (!s.iterate(true)) return false;
      ++s.iterations_total;
      ++out.iterations;
      trace_tick(tag);
      if (out.iterations > iter_cap) {
        throw Error("simplex repair phase exceeded its iteration cap");
      }
    }
  };

  auto run_opt = [&](const char* tag) -> bool {
    s.bland = false;
    s.degenerate_run = 0;
    while (s.iterate(false)) {
      ++s.iterations_total;
      ++out.iterations;
      trace_tick(tag);
      if (out.iterations > iter_cap) {
        throw Error("simplex exceeded its iteration cap");
      }
      if (s.any_infeasible()) {
        // numerical drift: rebuild and continue
        s.refactor();
        s.recompute_basics();
        if (s.any_infeasible() && !run_repair(tag)) return false;
      }
    }
    return true;
  };

  // once any solve has finished, later calls see only bound changes, and the
  // basis is still dual feasible: dual pivots re-solve in a few steps
  bool solved = false;
  if (s.dual_ready) {
    long long dual_cap = 2000000;
    for (;;) {
      int rc = s.dual_iterate();
      if (rc == 0) {
        // primal feasible again; bounds that were RELAXED since the last
        // solve can leave improving columns behind, so optimality still
        // needs a primal pass (short when only tightenings happened)
        if (!run_opt("dpolish")) {
          out.status = Status::Infeasible;
          out.iterations = s.iterations_total;
          return out;
        }
        solved = true;
        break;
      }
      if (rc < 0) {
        out.status = Status::Infeasible;
        out.iterations = s.iterations_total;
        return out;
      }
      ++s.iterations_total;
      ++out.iterations;
      trace_tick("dual");
      if (out.iterations > dual_cap) break;  // fall back to the primal path
    }
  }

  if (!solved) {
    if (!run_repair("repair")) {
      out.status = Status::Infeasible;
      out.iterations = s.iterations_total;
      return out;
    }

    // optimize with every finite bound nudged apart by a tiny per-column
    // offset: distinct vertices then have distinct objectives, so the walk
    // cannot revisit a vertex and degenerate plateaus turn into strictly
    // descending staircases; afterwards restore the true bounds and polish
    s.perturb_bounds();
    bool ok = run_opt("opt");
    if (s.perturbed_bounds()) {
      s.unperturb();
      for (int j = 0; j < s.n_all; ++j) {
        switch (s.state[static_cast<std::size_t>(j)]) {
          case Impl::AtLo:
            s.x[static_cast<std::size_t>(j)] = s.lo[static_cast<std::size_t>(j)];
            break;
          case Impl::AtUp:
            s.x[static_cast<std::size_t>(j)] = s.hi[static_cast<std::size_t>(j)];
            break;
          case Impl::InBasis:
            break;
        }
      }
      s.recompute_basics();
      if (ok) {
        if (!run_repair("cleanup")) {
          // the exact bounds were proven feasible before perturbing, so a
          // failure here is numerical: rebuild once and retry
          s.refactor();
          s.recompute_basics();
          if (!run_repair("cleanup")) {
            throw Error("simplex lost feasibility while removing perturbation");
          }
        }
        ok = run_opt("polish");
      }
    }
    if (!ok) {
      out.status = Status::Infeasible;
      out.iterations = s.iterations_total;
      return out;
    }
  }

  out.status = Status::Optimal;
  s.dual_ready = true;
  double obj = 0.0;
  for (int j = 0; j < s.n_struct; ++j) {
    obj += s.cost[static_cast<std::size_t>(j)] * s.x[static_cast<std::size_t>(j)];
  }
  out.objective = obj;
  return out;
}

BoundedSimplex make_relaxation(const MipModel& model) {
  if (!model.frozen()) throw Error("relaxation requires a frozen model");
  int n = model.var_count();
  int m = static_cast<int>(model.constraints().size());
  std::vector<std::vector<std::pair<int, double>>> cols(
      static_cast<std::size_t>(n));
  std::vector<double> cost(static_cast<std::size_t>(n), 0.0);
  std::vector<double> lo(static_cast<std::size_t>(n));
  std::vector<double> hi(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    lo[static_cast<std::size_t>(j)] = model.var({j}).lo;
    hi[static_cast<std::size_t>(j)] = model.var({j}).hi;
  }
  std::vector<Sense> senses;
  std::vector<double> rhs;
  for (int r = 0; r < m; ++r) {
    const Constraint& c = model.constraints()[static_cast<std::size_t>(r)];
    for (const auto& [v, a] : c.expr.terms()) {
      cols[static_cast<std::size_t>(v.index)].emplace_back(r, a);
    }
    senses.push_back(c.sense);
    rhs.push_back(c.rhs);
  }
  // maximize -> minimize
  for (const auto& [v, a] : model.objective().terms()) {
    cost[static_cast<std::size_t>(v.index)] = -a;
  }
  return BoundedSimplex(m, std::move(cols), std::move(cost), std::move(lo),
                        std::move(hi), std::move(senses), std::move(rhs));
}

}  // namespace catmip
