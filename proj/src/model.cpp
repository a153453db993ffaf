#include "catmip/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "catmip/errors.hpp"

namespace catmip {

LinExpr& LinExpr::add(VarId v, double coeff) {
  if (v.index < 0) throw Error("expression references an invalid variable id");
  if (!std::isfinite(coeff)) {
    throw Error("non-finite coefficient in expression");
  }
  if (coeff == 0.0) return *this;
  double& slot = terms_[v];
  slot += coeff;
  if (slot == 0.0) terms_.erase(v);
  return *this;
}

double LinExpr::evaluate(const std::vector<double>& assignment) const {
  double total = constant_;
  for (const auto& [v, coeff] : terms_) {
    total += coeff * assignment.at(static_cast<std::size_t>(v.index));
  }
  return total;
}

void MipModel::require_open(const char* op) const {
  if (frozen_) throw Error(std::string(op) + " on a frozen model");
}

void MipModel::require_declared(const LinExpr& e) const {
  for (const auto& [v, coeff] : e.terms()) {
    if (v.index < 0 || v.index >= var_count()) {
      throw Error("expression references undeclared variable id " +
                  std::to_string(v.index));
    }
    if (!std::isfinite(coeff)) {
      throw Error("non-finite coefficient on " + var(v).name);
    }
  }
}

VarId MipModel::add_var(const std::string& name, VarKind kind, double lo,
                        double hi) {
  require_open("add_var");
  if (name.empty()) throw Error("variable name must not be empty");
  if (!names_.emplace(name, var_count()).second) {
    throw Error("duplicate variable name: " + name);
  }
  if (std::isnan(lo) || std::isnan(hi) || lo > hi ||
      lo == std::numeric_limits<double>::infinity() ||
      hi == -std::numeric_limits<double>::infinity()) {
    throw Error("variable " + name + " needs ordered bounds");
  }
  if (kind == VarKind::Binary && (lo != 0.0 || hi != 1.0)) {
    throw Error("binary variable " + name + " must have bounds [0, 1]");
  }
  if (kind == VarKind::Integer &&
      (lo != std::floor(lo) || hi != std::floor(hi))) {
    throw Error("integer variable " + name + " needs integral bounds");
  }
  vars_.push_back({name, kind, lo, hi});
  return {var_count() - 1};
}

void MipModel::add_constraint(const std::string& name, LinExpr expr,
                              Sense sense, double rhs) {
  require_open("add_constraint");
  require_declared(expr);
  if (!std::isfinite(rhs)) throw Error("constraint " + name + ": non-finite rhs");
  // fold any constant into the right-hand side
  double folded = rhs - expr.constant();
  LinExpr body;
  for (const auto& [v, coeff] : expr.terms()) body.add(v, coeff);
  constraints_.push_back({name, std::move(body), sense, folded});
}

void MipModel::set_objective(LinExpr objective) {
  require_open("set_objective");
  require_declared(objective);
  objective_ = std::move(objective);
}

void MipModel::freeze() { frozen_ = true; }

void MipModel::fix_var(VarId v, double value) {
  require_open("fix_var");
  VarDef& def = vars_.at(static_cast<std::size_t>(v.index));
  if (value < def.lo || value > def.hi) {
    throw Error("cannot fix " + def.name + " to " + std::to_string(value) +
                ": outside its bounds");
  }
  def.lo = def.hi = value;
}

namespace {

void require_binary(const MipModel& model, VarId v, const char* role) {
  if (model.var(v).kind != VarKind::Binary) {
    throw Error(std::string(role) + " variable " + model.var(v).name +
                " must be binary");
  }
}

}  // namespace

void encode_bool_and(MipModel& model, VarId out,
                     const std::vector<VarId>& ins) {
  require_binary(model, out, "gate output");
  for (VarId in : ins) require_binary(model, in, "gate input");
  const std::string& base = model.var(out).name;
  if (ins.empty()) {
    model.fix_var(out, 1.0);  // empty conjunction is true
    return;
  }
  LinExpr lower;  // out >= sum(ins) - (n - 1)
  lower.add(out, 1.0);
  for (std::size_t i = 0; i < ins.size(); ++i) {
    LinExpr upper;  // out <= ins[i]
    upper.add(out, 1.0).add(ins[i], -1.0);
    model.add_constraint(base + "_le" + std::to_string(i), std::move(upper),
                         Sense::Le, 0.0);
    lower.add(ins[i], -1.0);
  }
  model.add_constraint(base + "_ge", std::move(lower), Sense::Ge,
                       -(static_cast<double>(ins.size()) - 1.0));
}

void encode_bool_or(MipModel& model, VarId out, const std::vector<VarId>& ins) {
  require_binary(model, out, "gate output");
  for (VarId in : ins) require_binary(model, in, "gate input");
  const std::string& base = model.var(out).name;
  if (ins.empty()) {
    model.fix_var(out, 0.0);  // empty disjunction is false
    return;
  }
  LinExpr upper;  // out <= sum(ins)
  upper.add(out, 1.0);
  for (std::size_t i = 0; i < ins.size(); ++i) {
    LinExpr lower;  // out >= ins[i]
    lower.add(out, 1.0).add(ins[i], -1.0);
    model.add_constraint(base + "_ge" + std::to_string(i), std::move(lower),
                         Sense::Ge, 0.0);
    upper.add(ins[i], -1.0);
  }
  model.add_constraint(base + "_le", std::move(upper), Sense::Le, 0.0);
}

}  // namespace catmip
