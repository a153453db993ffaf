#pragma once

#include <map>
#include <string>
#include <vector>

namespace catmip {

/* Mixed 0-1/integer linear model builder.
 *
 * Variables get dense ids in insertion order; names must be unique.  The
 * model is append-only until freeze(); solving and export require a frozen
 * model so ids can be trusted as array indexes.
 */

enum class VarKind { Binary, Integer, Continuous };

struct VarId {
  int index = -1;
  friend auto operator<=>(const VarId&, const VarId&) = default;
};

struct VarDef {
  std::string name;
  VarKind kind = VarKind::Binary;
  double lo = 0.0;
  double hi = 1.0;
};

// Linear expression: coefficient map plus a constant offset.  Zero
// coefficients are never stored.
class LinExpr {
 public:
  LinExpr() = default;
  explicit LinExpr(double constant) : constant_(constant) {}

  LinExpr& add(VarId v, double coeff);
  LinExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  const std::map<VarId, double>& terms() const { return terms_; }
  double constant() const { return constant_; }

  // Value under a full assignment (indexed by VarId).
  double evaluate(const std::vector<double>& assignment) const;

 private:
  std::map<VarId, double> terms_;
  double constant_ = 0.0;
};

enum class Sense { Le, Eq, Ge };

struct Constraint {
  std::string name;
  LinExpr expr;
  Sense sense = Sense::Le;
  double rhs = 0.0;
};

class MipModel {
 public:
  VarId add_var(const std::string& name, VarKind kind, double lo, double hi);
  VarId add_binary(const std::string& name) {
    return add_var(name, VarKind::Binary, 0.0, 1.0);
  }
  void add_constraint(const std::string& name, LinExpr expr, Sense sense,
                      double rhs);
  // Objective is always maximized.
  void set_objective(LinExpr objective);

  // Ends the build phase; further mutation throws.
  void freeze();
  bool frozen() const { return frozen_; }

  int var_count() const { return static_cast<int>(vars_.size()); }
  const VarDef& var(VarId v) const { return vars_.at(static_cast<std::size_t>(v.index)); }
  const std::vector<VarDef>& vars() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const LinExpr& objective() const { return objective_; }

  // Fix a variable by narrowing both bounds (allowed pre-freeze only).
  void fix_var(VarId v, double value);

 private:
  void require_open(const char* op) const;
  void require_declared(const LinExpr& e) const;

  std::vector<VarDef> vars_;
  std::map<std::string, int> names_;
  std::vector<Constraint> constraints_;
  LinExpr objective_;
  bool frozen_ = false;
};

// out = AND(ins) for binary variables: out <= in_i and
// out >= sum(ins) - (|ins| - 1).  Empty input fixes out to 1.
void encode_bool_and(MipModel& model, VarId out, const std::vector<VarId>& ins);

// out = OR(ins): out >= in_i and out <= sum(ins).  Empty input fixes out
// to 0.
void encode_bool_or(MipModel& model, VarId out, const std::vector<VarId>& ins);

}  // namespace catmip
