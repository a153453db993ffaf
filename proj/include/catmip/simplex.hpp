#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "catmip/model.hpp"

namespace catmip {

/* Bounded-variable primal simplex over
 *
 *     minimize c.x   subject to   A x (<=|=) b,   lo <= x <= hi,
 *
 * with one slack column per row (rows of sense >= are negated to <= on
 * construction; equality rows get a slack fixed to zero).  Feasibility is
 * restored by a built-in repair phase that minimizes the total bound
 * violation of the basic variables, so a solve can start from any basis:
 * the first call starts from the all-slack basis, later calls reuse
 * whatever basis the previous call ended with, even after bound changes.
 *
 * The basis inverse is kept as a sparse LU factorization plus a product
 * file of eta updates, refreshed every few dozen pivots.  Entering
 * variables are picked by largest reduced-cost violation; after a long
 * degenerate streak the rule drops to lowest-index for cycling safety.
 */
class BoundedSimplex {
 public:
  enum class Status { Optimal, Infeasible };
  struct Outcome {
    Status status = Status::Optimal;
    double objective = 0.0;  // of the minimization, no constant
    long long iterations = 0;
  };

  // Structural columns only; slacks are added internally.
  BoundedSimplex(int n_rows,
                 std::vector<std::vector<std::pair<int, double>>> columns,
                 std::vector<double> cost, std::vector<double> lo,
                 std::vector<double> hi, std::vector<Sense> row_sense,
                 std::vector<double> rhs);
  ~BoundedSimplex();

  BoundedSimplex(const BoundedSimplex&) = delete;
  BoundedSimplex& operator=(const BoundedSimplex&) = delete;
  BoundedSimplex(BoundedSimplex&&) noexcept;
  BoundedSimplex& operator=(BoundedSimplex&&) noexcept;

  // Structural bounds may change between solves (branching).
  void set_bounds(int col, double lo, double hi);
  std::pair<double, double> bounds(int col) const;

  Outcome solve();

  // Value of a structural column after an Optimal solve.
  double value(int col) const;

  int structural_count() const { return n_structural_; }

  static constexpr double kFeasTol = 1e-6;
  static constexpr double kPivotTol = 1e-9;

 private:
  struct Impl;
  int n_structural_ = 0;
  std::unique_ptr<Impl> impl_;
};

// Convenience: the LP data of a frozen maximize-model, negated into the
// minimize form consumed by BoundedSimplex.  Column i = model VarId i.
BoundedSimplex make_relaxation(const MipModel& model);

}  // namespace catmip
