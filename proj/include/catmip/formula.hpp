#pragma once

#include <memory>
#include <optional>
#include <string>

#include "catmip/world.hpp"

namespace catmip {

/* Task formulas over capability-augmenting task (CAT) atoms.
 *
 * A CAT atom holds on an agent's observation at step k when its (possibly
 * negated) label is on the current node, or when at least `aug.threshold`
 * other holders of the augmenting capability stand on the same node while
 * fewer than `limit.threshold` other holders of the limiting capability do.
 * An omitted aug clause disables the co-location route entirely; an omitted
 * limit clause never blocks it.
 *
 * Temporal operators carry closed integer windows [lo, hi], 0 <= lo <= hi.
 * Formula nodes are immutable and shared; all rewrites build new trees.
 */

struct Interval {
  int lo = 0;
  int hi = 0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct LabelRef {
  std::string label;
  bool negated = false;
  friend bool operator==(const LabelRef&, const LabelRef&) = default;
};

struct CapClause {
  std::string capability;
  int threshold = 1;
  friend bool operator==(const CapClause&, const CapClause&) = default;
};

struct CatAtom {
  LabelRef target;
  std::optional<CapClause> aug;
  std::optional<CapClause> limit;
  friend bool operator==(const CatAtom&, const CatAtom&) = default;
};

enum class FormulaKind { True, Cat, Not, And, Or, Eventually, Always, Until };

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
 public:
  // Factories validate their arguments (window ordering, thresholds >= 1,
  // limit only alongside aug, token shape) and throw Error on misuse.
  static FormulaPtr truth();
  static FormulaPtr cat(CatAtom atom);
  static FormulaPtr negation(FormulaPtr f);
  static FormulaPtr conj(FormulaPtr lhs, FormulaPtr rhs);
  static FormulaPtr disj(FormulaPtr lhs, FormulaPtr rhs);
  static FormulaPtr eventually(Interval w, FormulaPtr f);
  static FormulaPtr always(Interval w, FormulaPtr f);
  static FormulaPtr until(FormulaPtr lhs, Interval w, FormulaPtr rhs);

  FormulaKind kind() const { return kind_; }
  const CatAtom& atom() const;       // Cat only
  Interval window() const;           // Eventually/Always/Until only
  const FormulaPtr& child() const;   // Not/Eventually/Always only
  const FormulaPtr& lhs() const;     // And/Or/Until only
  const FormulaPtr& rhs() const;     // And/Or/Until only

 private:
  Formula() = default;
  FormulaKind kind_ = FormulaKind::True;
  std::optional<CatAtom> atom_;
  Interval window_;
  FormulaPtr a_, b_;
};

// Structural equality.
bool equal(const FormulaPtr& a, const FormulaPtr& b);

// Canonical text in the input grammar; parsing it back yields a structurally
// equal tree.
std::string print(const FormulaPtr& f);

// Number of future steps the formula can look at: windows accumulate, atoms
// look only at the current step.
int horizon(const FormulaPtr& f);

// Negation normal form: negation survives only directly above an atom (or
// TRUE, which has no dual literal).  Throws UnsupportedConstruct when a
// negation would land on an until.
FormulaPtr normalize(const FormulaPtr& f);

// True iff negation appears only directly above Cat/True nodes.
bool is_nnf(const FormulaPtr& f);

// Remove every aug/limit clause, leaving label-only atoms: the
// no-collaboration baseline.  Idempotent.
FormulaPtr strip_augmentation(const FormulaPtr& f);

// Drop clauses that the team roster makes vacuous: a limit threshold above
// the number of holders never blocks (drop limit); an aug threshold above the
// number of holders never fires (drop aug and limit).  Counts use the whole
// team; per-agent self-exclusion happens at evaluation/encoding time.
CatAtom simplify_cat(const CatAtom& atom, const Team& team);

// simplify_cat applied to every atom of a formula.
FormulaPtr simplify_cats(const FormulaPtr& f, const Team& team);

}  // namespace catmip
