#include "catmip/formula.hpp"

#include <algorithm>
#include <sstream>

#include "catmip/errors.hpp"

namespace catmip {

namespace {

bool valid_token(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
  }
  return true;
}

void check_window(Interval w) {
  if (w.lo < 0) throw Error("window lower bound must be non-negative");
  if (w.hi < w.lo) throw Error("window upper bound below lower bound");
}

void check_clause(const CapClause& c, const char* what) {
  if (!valid_token(c.capability)) {
    throw Error(std::string(what) + " capability token is malformed");
  }
  if (c.threshold < 1) {
    throw Error(std::string(what) + " threshold must be at least 1");
  }
}

}  // namespace

FormulaPtr Formula::truth() {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = FormulaKind::True;
  return f;
}

FormulaPtr Formula::cat(CatAtom atom) {
  if (!valid_token(atom.target.label)) {
    throw Error("label token is empty or has whitespace");
  }
  if (atom.limit && !atom.aug) {
    throw Error("limit clause requires an aug clause");
  }
  if (atom.aug) check_clause(*atom.aug, "aug");
  if (atom.limit) check_clause(*atom.limit, "limit");
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = FormulaKind::Cat;
  f->atom_ = std::move(atom);
  return f;
}

FormulaPtr Formula::negation(FormulaPtr f) {
  if (!f) throw Error("null operand");
  auto r = std::shared_ptr<Formula>(new Formula());
  r->kind_ = FormulaKind::Not;
  r->a_ = std::move(f);
  return r;
}

FormulaPtr Formula::conj(FormulaPtr lhs, FormulaPtr rhs) {
  if (!lhs || !rhs) throw Error("null operand");
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = FormulaKind::And;
  f->a_ = std::move(lhs);
  f->b_ = std::move(rhs);
  return f;
}

FormulaPtr Formula::disj(FormulaPtr lhs, FormulaPtr rhs) {
  if (!lhs || !rhs) throw Error("null operand");
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = FormulaKind::Or;
  f->a_ = std::move(lhs);
  f->b_ = std::move(rhs);
  return f;
}

FormulaPtr Formula::eventually(Interval w, FormulaPtr f) {
  check_window(w);
  if (!f) throw Error("null operand");
  auto r = std::shared_ptr<Formula>(new Formula());
  r->kind_ = FormulaKind::Eventually;
  r->window_ = w;
  r->a_ = std::move(f);
  return r;
}

FormulaPtr Formula::always(Interval w, FormulaPtr f) {
  check_window(w);
  if (!f) throw Error("null operand");
  auto r = std::shared_ptr<Formula>(new Formula());
  r->kind_ = FormulaKind::Always;
  r->window_ = w;
  r->a_ = std::move(f);
  return r;
}

FormulaPtr Formula::until(FormulaPtr lhs, Interval w, FormulaPtr rhs) {
  check_window(w);
  if (!lhs || !rhs) throw Error("null operand");
  auto r = std::shared_ptr<Formula>(new Formula());
  r->kind_ = FormulaKind::Until;
  r->window_ = w;
  r->a_ = std::move(lhs);
  r->b_ = std::move(rhs);
  return r;
}

const CatAtom& Formula::atom() const {
  if (kind_ != FormulaKind::Cat) throw Error("atom() on non-atom node");
  return *atom_;
}

Interval Formula::window() const {
  if (kind_ != FormulaKind::Eventually && kind_ != FormulaKind::Always &&
      kind_ != FormulaKind::Until) {
    throw Error("window() on non-temporal node");
  }
  return window_;
}

const FormulaPtr& Formula::child() const {
  if (kind_ != FormulaKind::Not && kind_ != FormulaKind::Eventually &&
      kind_ != FormulaKind::Always) {
    throw Error("child() on node without a single child");
  }
  return a_;
}

const FormulaPtr& Formula::lhs() const {
  if (kind_ != FormulaKind::And && kind_ != FormulaKind::Or &&
      kind_ != FormulaKind::Until) {
    throw Error("lhs() on non-binary node");
  }
  return a_;
}

const FormulaPtr& Formula::rhs() const {
  if (kind_ != FormulaKind::And && kind_ != FormulaKind::Or &&
      kind_ != FormulaKind::Until) {
    throw Error("rhs() on non-binary node");
  }
  return b_;
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case FormulaKind::True:
      return true;
    case FormulaKind::Cat:
      return a->atom() == b->atom();
    case FormulaKind::Not:
      return equal(a->child(), b->child());
    case FormulaKind::And:
    case FormulaKind::Or:
      return equal(a->lhs(), b->lhs()) && equal(a->rhs(), b->rhs());
    case FormulaKind::Eventually:
    case FormulaKind::Always:
      return a->window() == b->window() && equal(a->child(), b->child());
    case FormulaKind::Until:
      return a->window() == b->window() && equal(a->lhs(), b->lhs()) &&
             equal(a->rhs(), b->rhs());
  }
  return false;
}

namespace {

// Binding strength; higher binds tighter.  Until is weakest, then |, then &,
// then the prefix operators.
int precedence(FormulaKind k) {
  switch (k) {
    case FormulaKind::Until:
      return 1;
    case FormulaKind::Or:
      return 2;
    case FormulaKind::And:
      return 3;
    case FormulaKind::Not:
    case FormulaKind::Eventually:
    case FormulaKind::Always:
      return 4;
    default:
      return 5;
  }
}

std::string print_cat(const CatAtom& a) {
  std::ostringstream os;
  os << "CAT(";
  if (a.target.negated) os << '!';
  os << '"' << a.target.label << '"';
  if (a.aug) {
    os << ", aug(\"" << a.aug->capability << "\", " << a.aug->threshold
       << ')';
    if (a.limit) {
      os << ", limit(\"" << a.limit->capability << "\", "
         << a.limit->threshold << ')';
    }
  }
  os << ')';
  return os.str();
}

// min_prec: parenthesize when this node binds more loosely than the context
// requires.  & and | chains rebuild left-associated, U right-associated.
void print_rec(const FormulaPtr& f, int min_prec, std::ostringstream& os) {
  int prec = precedence(f->kind());
  bool wrap = prec < min_prec;
  if (wrap) os << '(';
  switch (f->kind()) {
    case FormulaKind::True:
      os << "TRUE";
      break;
    case FormulaKind::Cat:
      os << print_cat(f->atom());
      break;
    case FormulaKind::Not:
      os << '!';
      print_rec(f->child(), 4, os);
      break;
    case FormulaKind::Eventually:
    case FormulaKind::Always: {
      Interval w = f->window();
      os << (f->kind() == FormulaKind::Eventually ? 'F' : 'G') << '[' << w.lo
         << ',' << w.hi << "] ";
      print_rec(f->child(), 4, os);
      break;
    }
    case FormulaKind::And:
      print_rec(f->lhs(), 3, os);
      os << " & ";
      print_rec(f->rhs(), 4, os);
      break;
    case FormulaKind::Or:
      print_rec(f->lhs(), 2, os);
      os << " | ";
      print_rec(f->rhs(), 3, os);
      break;
    case FormulaKind::Until: {
      Interval w = f->window();
      print_rec(f->lhs(), 2, os);
      os << " U[" << w.lo << ',' << w.hi << "] ";
      print_rec(f->rhs(), 1, os);
      break;
    }
  }
  if (wrap) os << ')';
}

}  // namespace

std::string print(const FormulaPtr& f) {
  if (!f) throw Error("print: null formula");
  std::ostringstream os;
  print_rec(f, 0, os);
  return os.str();
}

int horizon(const FormulaPtr& f) {
  if (!f) throw Error("horizon: null formula");
  switch (f->kind()) {
    case FormulaKind::True:
    case FormulaKind::Cat:
      return 0;
    case FormulaKind::Not:
      return horizon(f->child());
    case FormulaKind::And:
    case FormulaKind::Or:
      return std::max(horizon(f->lhs()), horizon(f->rhs()));
    case FormulaKind::Eventually:
    case FormulaKind::Always:
      return f->window().hi + horizon(f->child());
    case FormulaKind::Until:
      return f->window().hi + std::max(horizon(f->lhs()), horizon(f->rhs()));
  }
  return 0;
}

namespace {

FormulaPtr nnf(const FormulaPtr& f, bool positive) {
  switch (f->kind()) {
    case FormulaKind::True:
      return positive ? f : Formula::negation(Formula::truth());
    case FormulaKind::Cat:
      return positive ? f : Formula::negation(f);
    case FormulaKind::Not:
      return nnf(f->child(), !positive);
    case FormulaKind::And:
      return positive ? Formula::conj(nnf(f->lhs(), true), nnf(f->rhs(), true))
                      : Formula::disj(nnf(f->lhs(), false),
                                      nnf(f->rhs(), false));
    case FormulaKind::Or:
      return positive ? Formula::disj(nnf(f->lhs(), true), nnf(f->rhs(), true))
                      : Formula::conj(nnf(f->lhs(), false),
                                      nnf(f->rhs(), false));
    case FormulaKind::Eventually:
      return positive
                 ? Formula::eventually(f->window(), nnf(f->child(), true))
                 : Formula::always(f->window(), nnf(f->child(), false));
    case FormulaKind::Always:
      return positive
                 ? Formula::always(f->window(), nnf(f->child(), true))
                 : Formula::eventually(f->window(), nnf(f->child(), false));
    case FormulaKind::Until:
      if (!positive) {
        throw UnsupportedConstruct(
            "negation normal form of a negated until is not supported");
      }
      return Formula::until(nnf(f->lhs(), true), f->window(),
                            nnf(f->rhs(), true));
  }
  throw Error("normalize: unknown node");
}

}  // namespace

FormulaPtr normalize(const FormulaPtr& f) {
  if (!f) throw Error("normalize: null formula");
  return nnf(f, true);
}

bool is_nnf(const FormulaPtr& f) {
  switch (f->kind()) {
    case FormulaKind::True:
    case FormulaKind::Cat:
      return true;
    case FormulaKind::Not:
      return f->child()->kind() == FormulaKind::Cat ||
             f->child()->kind() == FormulaKind::True;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Until:
      return is_nnf(f->lhs()) && is_nnf(f->rhs());
    case FormulaKind::Eventually:
    case FormulaKind::Always:
      return is_nnf(f->child());
  }
  return false;
}

FormulaPtr strip_augmentation(const FormulaPtr& f) {
  if (!f) throw Error("strip_augmentation: null formula");
  switch (f->kind()) {
    case FormulaKind::True:
      return f;
    case FormulaKind::Cat: {
      const CatAtom& a = f->atom();
      if (!a.aug && !a.limit) return f;
      return Formula::cat(CatAtom{a.target, std::nullopt, std::nullopt});
    }
    case FormulaKind::Not:
      return Formula::negation(strip_augmentation(f->child()));
    case FormulaKind::And:
      return Formula::conj(strip_augmentation(f->lhs()),
                           strip_augmentation(f->rhs()));
    case FormulaKind::Or:
      return Formula::disj(strip_augmentation(f->lhs()),
                           strip_augmentation(f->rhs()));
    case FormulaKind::Eventually:
      return Formula::eventually(f->window(), strip_augmentation(f->child()));
    case FormulaKind::Always:
      return Formula::always(f->window(), strip_augmentation(f->child()));
    case FormulaKind::Until:
      return Formula::until(strip_augmentation(f->lhs()), f->window(),
                            strip_augmentation(f->rhs()));
  }
  throw Error("strip_augmentation: unknown node");
}

CatAtom simplify_cat(const CatAtom& atom, const Team& team) {
  CatAtom out = atom;
  if (out.aug) {
    int holders = static_cast<int>(team.holders(out.aug->capability).size());
    if (out.aug->threshold > holders) {
      // The co-location route can never fire: drop both clauses.
      out.aug.reset();
      out.limit.reset();
      return out;
    }
  }
  if (out.limit) {
    int holders = static_cast<int>(team.holders(out.limit->capability).size());
    if (out.limit->threshold > holders) {
      out.limit.reset();
    }
  }
  return out;
}

FormulaPtr simplify_cats(const FormulaPtr& f, const Team& team) {
  if (!f) throw Error("simplify_cats: null formula");
  switch (f->kind()) {
    case FormulaKind::True:
      return f;
    case FormulaKind::Cat: {
      CatAtom s = simplify_cat(f->atom(), team);
      if (s == f->atom()) return f;
      return Formula::cat(std::move(s));
    }
    case FormulaKind::Not:
      return Formula::negation(simplify_cats(f->child(), team));
    case FormulaKind::And:
      return Formula::conj(simplify_cats(f->lhs(), team),
                           simplify_cats(f->rhs(), team));
    case FormulaKind::Or:
      return Formula::disj(simplify_cats(f->lhs(), team),
                           simplify_cats(f->rhs(), team));
    case FormulaKind::Eventually:
      return Formula::eventually(f->window(), simplify_cats(f->child(), team));
    case FormulaKind::Always:
      return Formula::always(f->window(), simplify_cats(f->child(), team));
    case FormulaKind::Until:
      return Formula::until(simplify_cats(f->lhs(), team), f->window(),
                            simplify_cats(f->rhs(), team));
  }
  throw Error("simplify_cats: unknown node");
}

}  // namespace catmip
