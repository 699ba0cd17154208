#pragma once

#include "moutard/expr.hpp"

namespace moutard {

// Exact symbolic partial derivative with respect to 'r' or 'z'; the result is
// returned in simplify() normal form.  Total on the supported node set
// (quotients stay quotients, so denominators remain visible to the
// singularity machinery; d cot(u) = -u' / sin(u)^2).
Expr differentiate(const Expr& e, char var);

} // namespace moutard
