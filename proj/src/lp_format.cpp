#include "catmip/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <vector>

#include "catmip/errors.hpp"

namespace catmip {

namespace {

std::string fmt_num(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool valid_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string sanitize(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) out.push_back(valid_char(c) ? c : '_');
  if (out.empty()) out = "v";
  bool digit_start = std::isdigit(static_cast<unsigned char>(out[0])) != 0;
  bool exp_like = (out[0] == 'e' || out[0] == 'E') &&
                  (out.size() == 1 ||
                   std::isdigit(static_cast<unsigned char>(out[1])) != 0);
  if (digit_start || exp_like) out.insert(out.begin(), 'x');
  return out;
}

// expression body; coefficient 1 collapses to the bare name
std::string render_terms(const LinExpr& e, const std::vector<std::string>& names,
                         double constant) {
  std::string out;
  for (const auto& [v, a] : e.terms()) {
    double mag = std::abs(a);
    if (out.empty()) {
      if (a < 0) out += "- ";
    } else {
      out += (a < 0) ? " - " : " + ";
    }
    if (mag != 1.0) {
      out += fmt_num(mag);
      out += ' ';
    }
    out += names[static_cast<std::size_t>(v.index)];
  }
  if (constant != 0.0) {
    if (out.empty()) {
      out = fmt_num(constant);
    } else {
      out += (constant < 0) ? " - " : " + ";
      out += fmt_num(std::abs(constant));
    }
  }
  if (out.empty()) out = "0";
  return out;
}

}  // namespace

LpExport to_lp_format(const MipModel& model) {
  if (!model.frozen()) throw Error("LP export requires a frozen model");

  LpExport out;
  std::vector<std::string> names;
  std::set<std::string> used;
  for (int j = 0; j < model.var_count(); ++j) {
    const std::string& orig = model.var({j}).name;
    std::string base = sanitize(orig);
    std::string name = base;
    for (int suffix = 2; used.count(name); ++suffix) {
      name = base + "_" + std::to_string(suffix);
    }
    used.insert(name);
    if (name != orig) out.renamed[orig] = name;
    names.push_back(name);
  }

  std::string& t = out.text;
  t += "Maximize\n";
  t += " obj: " +
       render_terms(model.objective(), names, model.objective().constant()) +
       "\n";

  t += "Subject To\n";
  int row = 0;
  for (const Constraint& c : model.constraints()) {
    const char* rel = c.sense == Sense::Le ? "<=" : c.sense == Sense::Ge ? ">=" : "=";
    t += " c" + std::to_string(row++) + ": " + render_terms(c.expr, names, 0.0) +
         " " + rel + " " + fmt_num(c.rhs) + "\n";
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::string bounds;
  std::string binaries;
  std::string generals;
  for (int j = 0; j < model.var_count(); ++j) {
    const VarDef& v = model.var({j});
    const std::string& n = names[static_cast<std::size_t>(j)];
    if (v.kind == VarKind::Binary) {
      binaries += " " + n + "\n";
      if (v.lo == v.hi) bounds += " " + n + " = " + fmt_num(v.lo) + "\n";
      continue;
    }
    if (v.kind == VarKind::Integer) generals += " " + n + "\n";
    if (v.lo == 0.0 && v.hi == kInf) continue;  // the LP-format default
    if (v.lo == v.hi) {
      bounds += " " + n + " = " + fmt_num(v.lo) + "\n";
    } else if (v.lo == -kInf && v.hi == kInf) {
      bounds += " " + n + " free\n";
    } else if (v.hi == kInf) {
      bounds += " " + n + " >= " + fmt_num(v.lo) + "\n";
    } else if (v.lo == -kInf) {
      bounds += " -infinity <= " + n + " <= " + fmt_num(v.hi) + "\n";
    } else {
      bounds += " " + fmt_num(v.lo) + " <= " + n + " <= " + fmt_num(v.hi) + "\n";
    }
  }
  if (!bounds.empty()) t += "Bounds\n" + bounds;
  if (!binaries.empty()) t += "Binaries\n" + binaries;
  if (!generals.empty()) t += "Generals\n" + generals;
  t += "End\n";
  return out;
}

}  // namespace catmip
