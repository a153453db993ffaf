#pragma once

#include <map>
#include <string>

#include "catmip/model.hpp"

namespace catmip {

// CPLEX-style LP text for a frozen model.
//
// Variable names are sanitized to [A-Za-z0-9_], guarded against a leading
// digit or exponent-like prefix, and uniquified; `renamed` maps each original
// name that had to change to the name used in the text. Rows are emitted as
// c0, c1, ... in declaration order (model row names are for diagnostics
// only). The objective constant, if any, appears as a literal trailing term.
// Lines end with LF.
struct LpExport {
  std::string text;
  std::map<std::string, std::string> renamed;
};

LpExport to_lp_format(const MipModel& model);

}  // namespace catmip
