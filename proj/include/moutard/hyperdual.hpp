#pragma once

#include "moutard/eval.hpp"
#include "moutard/expr.hpp"

namespace moutard {

// Forward-mode value with both first and all second partials in (r, z).
// Arithmetic reproduces the chain rule exactly (to rounding), independently
// of the symbolic differentiation path, so the two can cross-check each
// other.
struct HyperDual {
    double v = 0, dr = 0, dz = 0, drr = 0, drz = 0, dzz = 0;
};

// Throws EvalError on domain violations, like evaluate().
HyperDual evaluate_hyperdual(const Expr& e, double r, double z,
                             const ParameterSet& params);

} // namespace moutard
