#pragma once

#include "moutard/expr.hpp"

namespace moutard {

// Normalizing cleanup with a fixed, terminating rule set:
//   - exact constant folding over rationals (including literal powers),
//   - identity elimination: x+0, x*1, x*0, x^0, x^1, double negation,
//   - flattening of +/- and * chains with a canonical structural ordering
//     (signs are absorbed into rational coefficients).
// Deliberately no factoring, no cancellation of like terms, no trig or log
// identities: equality of expressions is established numerically elsewhere.
// Idempotent: simplify(simplify(e)) is structurally equal to simplify(e).
Expr simplify(const Expr& e);

} // namespace moutard
