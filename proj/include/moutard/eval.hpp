#pragma once

#include <map>
#include <string>

#include "moutard/errors.hpp"
#include "moutard/expr.hpp"

namespace moutard {

using ParameterSet = std::map<std::string, double>;

// Value together with an accumulated magnitude bound: |a|+|b| for sums,
// products of magnitudes for products, first-order error propagation through
// functions.  A denominator whose value is far smaller than its magnitude has
// lost its leading digits to cancellation, which is how points near curves
// like r^2 = 2 z^2 are recognized as singular without symbolic root-finding.
struct Magnitude {
    double value;
    double magnitude;
};

// IEEE double evaluation.  Domain violations (ln of a non-positive value,
// division by exact zero, sqrt of a negative, non-finite intermediates) and
// near-singular denominators (|den| < threshold * magnitude) throw EvalError
// carrying the offending subexpression; a NaN is never returned as success.
double evaluate(const Expr& e, double r, double z, const ParameterSet& params,
                double singular_threshold = 1e-8);

Magnitude evaluate_with_magnitude(const Expr& e, double r, double z,
                                  const ParameterSet& params,
                                  double singular_threshold = 1e-8);

enum class PointClass { Regular, NearSingular, DomainError };

struct PointStatus {
    PointClass cls;
    std::string detail; // empty when Regular
};

// Non-throwing wrapper for probing grids and paths.  Unbound parameters are a
// caller bug, not a property of the point, and still throw.
PointStatus classify_point(const Expr& e, double r, double z,
                           const ParameterSet& params,
                           double singular_threshold = 1e-8);

} // namespace moutard
