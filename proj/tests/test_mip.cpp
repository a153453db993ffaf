#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "catmip/errors.hpp"
#include "catmip/lp_format.hpp"
#include "catmip/model.hpp"
#include "catmip/rng.hpp"
#include "catmip/solver.hpp"
#include "doctest.h"
#include "support/lp_reader.hpp"

using namespace catmip;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MipModel knapsack() {
  MipModel m;
  VarId a = m.add_binary("a");
  VarId b = m.add_binary("b");
  VarId c = m.add_binary("c");
  LinExpr row;
  row.add(a, 2).add(b, 3).add(c, 4);
  m.add_constraint("cap", row, Sense::Le, 5);
  LinExpr obj;
  obj.add(a, 5).add(b, 4).add(c, 3);
  m.set_objective(obj);
  m.freeze();
  return m;
}

// x + y = 1.5 over binaries: LP-feasible, integer-infeasible
MipModel half_sum() {
  MipModel m;
  VarId x = m.add_binary("x");
  VarId y = m.add_binary("y");
  LinExpr row;
  row.add(x, 1).add(y, 1);
  m.add_constraint("sum", row, Sense::Eq, 1.5);
  LinExpr obj;
  obj.add(x, 1).add(y, 1);
  m.set_objective(obj);
  m.freeze();
  return m;
}

bool point_feasible(const MipModel& m, const std::vector<double>& x,
                    double tol) {
  for (const Constraint& c : m.constraints()) {
    double lhs = c.expr.evaluate(x);
    switch (c.sense) {
      case Sense::Le:
        if (lhs > c.rhs + tol) return false;
        break;
      case Sense::Ge:
        if (lhs < c.rhs - tol) return false;
        break;
      case Sense::Eq:
        if (std::abs(lhs - c.rhs) > tol) return false;
        break;
    }
  }
  for (int j = 0; j < m.var_count(); ++j) {
    const VarDef& v = m.var({j});
    double val = x[static_cast<std::size_t>(j)];
    if (val < v.lo - tol || val > v.hi + tol) return false;
    if (v.kind != VarKind::Continuous &&
        std::abs(val - std::round(val)) > 1e-9) {
      return false;
    }
  }
  return true;
}

struct BestPoint {
  bool feasible = false;
  double best = 0.0;
};

// exhaustive oracle over integral domains; all vars must have small
// integral bounds
BestPoint enumerate_best(const MipModel& m) {
  int n = m.var_count();
  std::vector<std::vector<double>> domain(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const VarDef& v = m.var({j});
    REQUIRE(v.lo == std::floor(v.lo));
    REQUIRE(v.hi == std::floor(v.hi));
    for (double val = v.lo; val <= v.hi; val += 1.0) {
      domain[static_cast<std::size_t>(j)].push_back(val);
    }
  }
  BestPoint out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> x(static_cast<std::size_t>(n));
  while (true) {
    for (int j = 0; j < n; ++j) {
      x[static_cast<std::size_t>(j)] =
          domain[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
    }
    if (point_feasible(m, x, 1e-9)) {
      double obj = m.objective().evaluate(x);
      if (!out.feasible || obj > out.best) {
        out.feasible = true;
        out.best = obj;
      }
    }
    int j = 0;
    for (; j < n; ++j) {
      auto& slot = idx[static_cast<std::size_t>(j)];
      if (++slot < domain[static_cast<std::size_t>(j)].size()) break;
      slot = 0;
    }
    if (j == n) break;
  }
  return out;
}

MipModel random_mip(SplitMix64& rng, bool fractional_costs) {
  MipModel m;
  int n = 2 + static_cast<int>(rng.next_below(8));  // 2..9 vars
  std::vector<VarId> vars;
  for (int j = 0; j < n; ++j) {
    std::string name = "v" + std::to_string(j);
    if (rng.next_bool(0.2)) {
      vars.push_back(m.add_var(name, VarKind::Integer, 0, 3));
    } else {
      vars.push_back(m.add_binary(name));
    }
  }
  int rows = 1 + static_cast<int>(rng.next_below(6));
  for (int r = 0; r < rows; ++r) {
    LinExpr e;
    for (int j = 0; j < n; ++j) {
      if (!rng.next_bool(0.55)) continue;
      int coef = static_cast<int>(rng.next_below(9)) - 4;
      if (coef == 0) coef = 1;
      e.add(vars[static_cast<std::size_t>(j)], coef);
    }
    if (e.terms().empty()) {
      e.add(vars[rng.next_below(static_cast<std::uint64_t>(n))], 1);
    }
    Sense s = rng.next_bool(0.15)  ? Sense::Eq
              : rng.next_bool(0.5) ? Sense::Le
                                   : Sense::Ge;
    double rhs = static_cast<double>(static_cast<int>(rng.next_below(10)) - 3);
    m.add_constraint("r" + std::to_string(r), e, s, rhs);
  }
  LinExpr obj;
  for (int j = 0; j < n; ++j) {
    int coef = static_cast<int>(rng.next_below(11)) - 5;
    if (coef == 0 && j == 0) coef = 1;
    if (coef != 0) {
      double c = coef;
      if (fractional_costs && rng.next_bool(0.5)) c += 0.5;
      obj.add(vars[static_cast<std::size_t>(j)], c);
    }
  }
  if (rng.next_bool(0.3)) {
    obj.add_constant(static_cast<double>(static_cast<int>(rng.next_below(7)) - 3));
  }
  m.set_objective(obj);
  m.freeze();
  return m;
}

}  // namespace

TEST_CASE("linear expressions accumulate and evaluate") {
  MipModel m;
  VarId a = m.add_binary("a");
  VarId b = m.add_binary("b");
  LinExpr e;
  e.add(a, 2).add(b, 1).add(a, -1).add_constant(3);
  CHECK(e.terms().size() == 2);
  CHECK(e.terms().at(a) == 1.0);
  CHECK(e.evaluate({1.0, 1.0}) == 5.0);
  e.add(b, -1);  // cancels to zero and drops the slot
  CHECK(e.terms().size() == 1);
  CHECK(e.terms().count(b) == 0);
}

TEST_CASE("model builder rejects bad input") {
  MipModel m;
  VarId a = m.add_binary("a");
  CHECK_THROWS_WITH_AS(m.add_binary("a"), doctest::Contains("duplicate"),
                       Error);
  CHECK_THROWS_AS(m.add_var("", VarKind::Continuous, 0, 1), Error);
  CHECK_THROWS_AS(m.add_var("w", VarKind::Continuous, 2, 1), Error);
  CHECK_THROWS_AS(m.add_var("b2", VarKind::Binary, 0, 2), Error);
  CHECK_THROWS_AS(m.add_var("i1", VarKind::Integer, 0.5, 2), Error);
  CHECK_THROWS_AS(m.fix_var(a, 2.0), Error);

  LinExpr e;
  CHECK_THROWS_AS(e.add(VarId{}, 1.0), Error);
  CHECK_THROWS_AS(e.add(a, std::numeric_limits<double>::quiet_NaN()), Error);

  LinExpr obj;
  obj.add(a, 1);
  m.set_objective(obj);
  m.freeze();
  CHECK_THROWS_WITH_AS(m.add_binary("z"), doctest::Contains("frozen"), Error);
  CHECK_THROWS_AS(m.fix_var(a, 1.0), Error);
  CHECK_THROWS_AS(m.add_constraint("r", obj, Sense::Le, 1), Error);
}

TEST_CASE("solve requires a frozen model") {
  MipModel m;
  m.add_binary("a");
  CHECK_THROWS_AS(solve(m), Error);
  CHECK_THROWS_AS(lp_relax(m), Error);
}

TEST_CASE("conjunction gadget matches the truth table") {
  for (int n = 1; n <= 3; ++n) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      for (int dir = 0; dir < 2; ++dir) {
        MipModel m;
        VarId out = m.add_binary("out");
        std::vector<VarId> ins;
        bool expect = true;
        for (int j = 0; j < n; ++j) {
          bool bit = (mask >> j) & 1u;
          expect = expect && bit;
          VarId v = m.add_binary("i" + std::to_string(j));
          m.fix_var(v, bit ? 1.0 : 0.0);
          ins.push_back(v);
        }
        encode_bool_and(m, out, ins);
        LinExpr obj;
        obj.add(out, dir == 0 ? 1.0 : -1.0);
        m.set_objective(obj);
        m.freeze();
        Solution sol = solve(m);
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK(sol.value(out) == (expect ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("disjunction gadget matches the truth table") {
  for (int n = 1; n <= 3; ++n) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      for (int dir = 0; dir < 2; ++dir) {
        MipModel m;
        VarId out = m.add_binary("out");
        std::vector<VarId> ins;
        bool expect = false;
        for (int j = 0; j < n; ++j) {
          bool bit = (mask >> j) & 1u;
          expect = expect || bit;
          VarId v = m.add_binary("i" + std::to_string(j));
          m.fix_var(v, bit ? 1.0 : 0.0);
          ins.push_back(v);
        }
        encode_bool_or(m, out, ins);
        LinExpr obj;
        obj.add(out, dir == 0 ? 1.0 : -1.0);
        m.set_objective(obj);
        m.freeze();
        Solution sol = solve(m);
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK(sol.value(out) == (expect ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("empty gadgets pin the output") {
  MipModel m;
  VarId t = m.add_binary("t");
  VarId f = m.add_binary("f");
  encode_bool_and(m, t, {});
  encode_bool_or(m, f, {});
  LinExpr obj;
  obj.add(t, -1).add(f, 1);  // push both toward the wrong value
  m.set_objective(obj);
  m.freeze();
  Solution sol = solve(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.value(t) == 1.0);
  CHECK(sol.value(f) == 0.0);
}

TEST_CASE("continuous relaxation solves without branching") {
  MipModel m;
  VarId x = m.add_var("x", VarKind::Continuous, 0, kInf);
  VarId y = m.add_var("y", VarKind::Continuous, 0, kInf);
  LinExpr row;
  row.add(x, 1).add(y, 1);
  m.add_constraint("cap", row, Sense::Le, 1);
  LinExpr obj;
  obj.add(x, 1).add(y, 1);
  m.set_objective(obj);
  m.freeze();
  Solution sol = solve(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.stats.nodes == 1);
}

TEST_CASE("knapsack relaxation and integer optimum coincide at 9") {
  MipModel m = knapsack();
  auto relax = lp_relax(m);
  REQUIRE(relax.has_value());
  CHECK(*relax == doctest::Approx(9.0).epsilon(1e-6));

  Solution sol = solve(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(9.0).epsilon(1e-6));
  REQUIRE(sol.has_assignment());
  CHECK(sol.value({0}) == 1.0);
  CHECK(sol.value({1}) == 1.0);
  CHECK(sol.value({2}) == 0.0);
}

TEST_CASE("relaxation honors fixings and rejects bad ones") {
  MipModel m = knapsack();
  auto fixed_a0 = lp_relax(m, {{{0}, 0.0}});
  REQUIRE(fixed_a0.has_value());
  // remaining LP: max 4b + 3c with 3b + 4c <= 5 -> b = 1, c = 1/2
  CHECK(*fixed_a0 == doctest::Approx(5.5).epsilon(1e-6));

  auto all_fixed = lp_relax(m, {{{0}, 1.0}, {{1}, 1.0}, {{2}, 0.0}});
  REQUIRE(all_fixed.has_value());
  CHECK(*all_fixed == doctest::Approx(9.0).epsilon(1e-6));

  // a and c together weigh 6 and overflow the capacity of 5
  CHECK_FALSE(lp_relax(m, {{{0}, 1.0}, {{1}, 0.0}, {{2}, 1.0}}).has_value());

  CHECK_THROWS_WITH_AS(lp_relax(m, {{{0}, 2.0}}),
                       doctest::Contains("outside its bounds"), Error);

  MipModel hard;
  VarId x = hard.add_binary("x");
  VarId y = hard.add_binary("y");
  LinExpr row;
  row.add(x, 1).add(y, 1);
  hard.add_constraint("need2", row, Sense::Ge, 2);
  LinExpr obj;
  obj.add(x, 1);
  hard.set_objective(obj);
  hard.freeze();
  CHECK(lp_relax(hard).has_value());
  CHECK_FALSE(lp_relax(hard, {{{0}, 0.0}}).has_value());
}

TEST_CASE("integer-infeasible model is proven infeasible") {
  MipModel m = half_sum();
  CHECK(lp_relax(m).has_value());  // the relaxation itself is feasible
  Solution sol = solve(m);
  CHECK(sol.status == SolveStatus::Infeasible);
  CHECK_FALSE(sol.has_assignment());
}

TEST_CASE("general integer variables branch correctly") {
  MipModel m;
  VarId x = m.add_var("x", VarKind::Integer, 0, 3);
  VarId y = m.add_var("y", VarKind::Integer, 0, 3);
  LinExpr row;
  row.add(x, 1).add(y, 1);
  m.add_constraint("cap", row, Sense::Le, 3.5);
  LinExpr obj;
  obj.add(x, 3).add(y, 2);
  m.set_objective(obj);
  m.freeze();
  Solution sol = solve(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(9.0).epsilon(1e-9));
  CHECK(sol.value(x) == 3.0);
  CHECK(sol.value(y) == 0.0);
}

TEST_CASE("mixed continuous and binary optimum") {
  MipModel m;
  VarId b1 = m.add_binary("b1");
  VarId b2 = m.add_binary("b2");
  VarId x = m.add_var("x", VarKind::Continuous, 0, 1);
  LinExpr row;
  row.add(b1, 1).add(b2, 1).add(x, 1);
  m.add_constraint("cap", row, Sense::Le, 1.5);
  LinExpr obj;
  obj.add(b1, 3).add(b2, 3).add(x, 1);
  m.set_objective(obj);
  m.freeze();
  Solution sol = solve(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(3.5).epsilon(1e-6));
  REQUIRE(sol.has_assignment());
  CHECK(point_feasible(m, sol.assignment, 1e-6));
}

TEST_CASE("equality row with objective constant") {
  MipModel m;
  VarId x = m.add_binary("x");
  VarId y = m.add_binary("y");
  VarId z = m.add_binary("z");
  LinExpr row;
  row.add(x, 1).add(y, 1).add(z, 1);
  m.add_constraint("pick2", row, Sense::Eq, 2);
  LinExpr obj;
  obj.add(x, 1).add(y, 2).add(z, 3).add_constant(10);
  m.set_objective(obj);
  m.freeze();
  Solution sol = solve(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(15.0).epsilon(1e-9));
  CHECK(sol.value(x) == 0.0);
  CHECK(sol.value(y) == 1.0);
  CHECK(sol.value(z) == 1.0);

  auto relax = lp_relax(m);
  REQUIRE(relax.has_value());
  CHECK(*relax == doctest::Approx(15.0).epsilon(1e-6));
}

TEST_CASE("random models agree with exhaustive enumeration") {
  SplitMix64 rng(0xA1B5EEDull);
  int solved = 0;
  for (int it = 0; it < 200; ++it) {
    bool fractional = it >= 120;
    MipModel m = random_mip(rng, fractional);
    BestPoint truth = enumerate_best(m);
    Solution sol = solve(m);
    CAPTURE(it);
    if (truth.feasible) {
      REQUIRE(sol.status == SolveStatus::Optimal);
      CHECK(sol.objective == doctest::Approx(truth.best).epsilon(1e-6));
      REQUIRE(sol.has_assignment());
      CHECK(point_feasible(m, sol.assignment, 1e-6));
      CHECK(m.objective().evaluate(sol.assignment) ==
            doctest::Approx(sol.objective).epsilon(1e-9));
      ++solved;
    } else {
      CHECK(sol.status == SolveStatus::Infeasible);
      CHECK_FALSE(sol.has_assignment());
    }
  }
  CHECK(solved > 50);  // the generator must not be degenerate
}

TEST_CASE("identical inputs give identical searches") {
  SplitMix64 rng(77);
  for (int it = 0; it < 20; ++it) {
    MipModel m = random_mip(rng, it % 2 == 1);
    Solution s1 = solve(m);
    Solution s2 = solve(m);
    CHECK(s1.status == s2.status);
    CHECK(s1.stats.nodes == s2.stats.nodes);
    CHECK(s1.stats.lp_iterations == s2.stats.lp_iterations);
    CHECK(s1.objective == s2.objective);
    CHECK(s1.assignment == s2.assignment);
  }
}

TEST_CASE("budgets cut the search off") {
  MipModel m = half_sum();
  SolveOptions opts;
  opts.node_budget = 1;
  Solution sol = solve(m, opts);
  CHECK(sol.status == SolveStatus::BudgetExceeded);

  SolveOptions tight;
  tight.time_budget_s = 0.0;
  Solution sol2 = solve(m, tight);
  CHECK(sol2.status == SolveStatus::BudgetExceeded);
}

TEST_CASE("export writes the expected text for the knapsack") {
  MipModel m = knapsack();
  LpExport lp = to_lp_format(m);
  CHECK(lp.renamed.empty());
  CHECK(lp.text ==
        "Maximize\n"
        " obj: 5 a + 4 b + 3 c\n"
        "Subject To\n"
        " c0: 2 a + 3 b + 4 c <= 5\n"
        "Binaries\n"
        " a\n"
        " b\n"
        " c\n"
        "End\n");
}

TEST_CASE("export covers every bound shape") {
  MipModel m;
  VarId b = m.add_binary("b");
  m.fix_var(b, 1.0);
  m.add_var("n", VarKind::Integer, 0, kInf);  // LP-format default, no line
  m.add_var("k", VarKind::Integer, 1, 4);
  m.add_var("f", VarKind::Continuous, -kInf, kInf);
  m.add_var("lo_only", VarKind::Continuous, 2.5, kInf);
  m.add_var("hi_only", VarKind::Continuous, -kInf, 7);
  VarId p = m.add_var("pinned", VarKind::Continuous, 3, 3);
  LinExpr obj;
  obj.add(b, 1).add(p, 1).add_constant(-2);
  m.set_objective(obj);
  m.freeze();
  LpExport lp = to_lp_format(m);
  CHECK(lp.text ==
        "Maximize\n"
        " obj: b + pinned - 2\n"
        "Subject To\n"
        "Bounds\n"
        " b = 1\n"
        " 1 <= k <= 4\n"
        " f free\n"
        " lo_only >= 2.5\n"
        " -infinity <= hi_only <= 7\n"
        " pinned = 3\n"
        "Binaries\n"
        " b\n"
        "Generals\n"
        " n\n"
        " k\n"
        "End\n");
}

TEST_CASE("export sanitizes awkward names") {
  MipModel m;
  VarId a = m.add_var("z[1,(2->3)]", VarKind::Continuous, 0, 1);
  VarId bb = m.add_var("z_1__2__3__", VarKind::Continuous, 0, 1);
  VarId c = m.add_var("1st", VarKind::Continuous, 0, 1);
  VarId d = m.add_var("e5", VarKind::Continuous, 0, 1);
  LinExpr obj;
  obj.add(a, 1).add(bb, 1).add(c, 1).add(d, 1);
  m.set_objective(obj);
  m.freeze();
  LpExport lp = to_lp_format(m);
  CHECK(lp.renamed.at("z[1,(2->3)]") == "z_1__2__3__");
  CHECK(lp.renamed.at("z_1__2__3__") == "z_1__2__3___2");
  CHECK(lp.renamed.at("1st") == "x1st");
  CHECK(lp.renamed.at("e5") == "xe5");
  CHECK(lp.renamed.size() == 4);

  lptest::LpData data = lptest::parse_lp(lp.text);
  CHECK(data.objective.size() == 4);
  CHECK(data.objective.count("z_1__2__3___2") == 1);
}

TEST_CASE("the reference reader round-trips an export") {
  SplitMix64 rng(4242);
  for (int it = 0; it < 25; ++it) {
    MipModel m = random_mip(rng, it % 2 == 0);
    LpExport lp = to_lp_format(m);
    REQUIRE(lp.renamed.empty());
    lptest::LpData data = lptest::parse_lp(lp.text);

    std::map<std::string, double> want_obj;
    for (const auto& [v, coef] : m.objective().terms()) {
      want_obj[m.var(v).name] = coef;
    }
    CHECK(data.objective == want_obj);
    CHECK(data.obj_constant == m.objective().constant());

    REQUIRE(data.rows.size() == m.constraints().size());
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
      const Constraint& c = m.constraints()[r];
      const lptest::LpRow& row = data.rows[r];
      CHECK(row.name == "c" + std::to_string(r));
      char want = c.sense == Sense::Le ? '<' : c.sense == Sense::Ge ? '>' : '=';
      CHECK(row.sense == want);
      CHECK(row.rhs == c.rhs);
      std::map<std::string, double> want_terms;
      for (const auto& [v, coef] : c.expr.terms()) {
        want_terms[m.var(v).name] = coef;
      }
      CHECK(row.terms == want_terms);
    }

    std::set<std::string> want_bin, want_gen;
    for (int j = 0; j < m.var_count(); ++j) {
      const VarDef& v = m.var({j});
      if (v.kind == VarKind::Binary) want_bin.insert(v.name);
      if (v.kind == VarKind::Integer) want_gen.insert(v.name);
    }
    CHECK(data.binaries == want_bin);
    CHECK(data.generals == want_gen);

    // integer vars in the generator are [0,3]; the bound line must say so
    for (const std::string& g : data.generals) {
      REQUIRE(data.bounds.count(g) == 1);
      CHECK(data.bounds.at(g) == std::pair<double, double>(0.0, 3.0));
    }
  }
}

TEST_CASE("export requires a frozen model") {
  MipModel m;
  m.add_binary("a");
  CHECK_THROWS_WITH_AS(to_lp_format(m), doctest::Contains("frozen"), Error);
}
