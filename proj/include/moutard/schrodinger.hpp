#pragma once

#include <optional>
#include <vector>

#include "moutard/eval.hpp"
#include "moutard/expr.hpp"
#include "moutard/grid.hpp"

namespace moutard {

// Potential u(r, z) of the stationary axially symmetric Schrodinger operator
//   L[Y] = Y_rr + (1/r) Y_r + Y_zz - u Y.
// `region`, when set, records the box the expression is meant to be used on;
// `singular_threshold` feeds evaluate_with_magnitude's cancellation test.
struct Potential {
  Expr expr;
  std::optional<GridSpec> region;
  double singular_threshold = 1e-8;
};

// A claimed solution of L[Y] = 0 for some associated Potential.  The claim is
// established by residual_report before any transformation consumes it.
struct SeedSolution {
  Expr expr;
  std::optional<GridSpec> region;
  double singular_threshold = 1e-8;
};

// Grid sweep statistics for a pointwise residual.  Points where evaluation
// hits a near-singular denominator or a domain error are skipped and counted;
// worst_point is the argmax of the relative residual.
struct ResidualReport {
  GridSpec grid{};
  long n_evaluated = 0;
  long n_skipped_singular = 0;
  double max_abs_residual = 0.0;
  double max_rel_residual = 0.0;
  double worst_r = 0.0;
  double worst_z = 0.0;
};

struct GridCompareOptions {
  double singular_threshold = 1e-8;
  double scale_floor = 1e-30;
};

// Shared residual sweep: at each grid point evaluates every expression in
// `residuals` and `scales`; the pointwise absolute residual is
// max_i |residuals[i]| and the relative one divides by
// max(max_j |scales[j]|, scale_floor).  A point is skipped if any evaluation
// reports NearSingular or Domain.  Throws NumericalError when every point is
// skipped, EvalError when a parameter is unbound.
ResidualReport compare_on_grid(const std::vector<Expr>& residuals,
                               const std::vector<Expr>& scales,
                               const GridSpec& grid, const ParameterSet& params,
                               const GridCompareOptions& options = {});

// Symbolic L[y] = y_rr + (1/r) y_r + y_zz - u y (simplified).
Expr apply_operator(const Potential& u, const SeedSolution& y);

// Evaluates L[y] pointwise over the grid, term by term; the relative scale is
// the largest term magnitude max(|y_rr|, |y_r/r|, |y_zz|, |u y|, 1e-30).
ResidualReport residual_report(const Potential& u, const SeedSolution& y,
                               const GridSpec& grid,
                               const ParameterSet& params);

// u = -h_rr + h_r^2 + h_r/r + 1/r^2 - h_zz + h_z^2: the potential solved by
// Y_h = (1/r) exp(-h).
Potential potential_from_h(const Expr& h);

// h = -ln(r y_h); inverse of y_h = (1/r) exp(-h).  Domain errors where
// r y_h <= 0 surface at evaluation time.
Expr h_from_seed(const SeedSolution& y_h);

// Residuals of the first-order system linking a solution Y to its transform:
// with W = r Y Y_h and Q = r Y_h Y~ the two equations reduce to
//   B - dQ/dz = 0   and   dQ/dr - A = 0,
// where A = -r (Y_z Y_h - Y Y_h,z) and B = r (Y_r Y_h - Y Y_h,r).  Scale is
// max(|A|, |B|, |Q_r|, |Q_z|, floor) pointwise.
ResidualReport wq_consistency(const SeedSolution& y,
                              const SeedSolution& y_tilde,
                              const SeedSolution& y_h, const GridSpec& grid,
                              const ParameterSet& params);

// Grid sweep of a single expression's values: extrema with their locations,
// skip counts, and sign changes between evaluated neighbors.  all_finite
// means every grid point evaluated without a domain error or singular skip.
struct ScanReport {
  GridSpec grid{};
  long n_evaluated = 0;
  long n_skipped_singular = 0;
  long n_domain_error = 0;
  double min_value = 0.0;
  double max_value = 0.0;
  double argmin_r = 0.0, argmin_z = 0.0;
  double argmax_r = 0.0, argmax_z = 0.0;
  long sign_changes = 0;
  bool all_finite = false;
};

ScanReport scan_expression(const Expr& e, const GridSpec& grid,
                           const ParameterSet& params,
                           double singular_threshold = 1e-8);

}  // namespace moutard
