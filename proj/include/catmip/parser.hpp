#pragma once

#include <set>
#include <string>

#include "catmip/formula.hpp"

namespace catmip {

/* Text form of task formulas:
 *
 *   formula := "TRUE" | cat | "!" formula | formula "&" formula
 *            | formula "|" formula | ("F"|"G") "[" int "," int "]" formula
 *            | formula "U" "[" int "," int "]" formula | "(" formula ")"
 *   cat     := "CAT" "(" labelref ["," "aug" "(" qcap ")"
 *                                   ["," "limit" "(" qcap ")"]] ")"
 *   labelref:= ["!"] '"' name '"'
 *   qcap    := '"' name '"' "," int
 *
 * "!" binds tighter than "&", which binds tighter than "|", which binds
 * tighter than "U"; the prefix operators F/G/! bind tighter than any binary
 * operator.  "&" and "|" associate left, "U" associates right.
 *
 * Every label must appear in `labels` and every capability in
 * `capabilities`; violations raise ParseError with the offending position.
 */
FormulaPtr parse_formula(const std::string& text,
                         const std::set<std::string>& labels,
                         const std::set<std::string>& capabilities);

}  // namespace catmip
