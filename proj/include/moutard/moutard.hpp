#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "moutard/fields.hpp"
#include "moutard/schrodinger.hpp"

namespace moutard {

// Exact differential dP = A dr + B dz of the product P = r Y_h Y~, built
// from a solution pair (Y, Y_h) of the same potential:
//   A = -r (Y_z Y_h - Y Y_h,z),  B = r (Y_r Y_h - Y Y_h,r).
// Closedness (dA/dz == dB/dr) holds exactly when both seeds solve the same
// equation; it is the integrability of the nonlocal variable.
struct OneForm {
  Expr a;
  Expr b;
  Expr y;    // provenance: the transported solution
  Expr y_h;  // provenance: the transformation seed
};

OneForm make_oneform(const SeedSolution& y, const SeedSolution& y_h);

// One completed transformation: the input potential, the verified seed, and
// the output potential.  The new background solution is the trivial partner
// 1/(r y_h), corresponding to replacing h by -h - ln(r).
struct TransformStep {
  Potential u;
  SeedSolution y_h;
  ParameterSet params;
  ResidualReport verified;  // residual of y_h under u
  Potential u_tilde;
};

// Unchecked symbolic transform, rational in y_h (no logarithms), so seeds
// that change sign are handled:
//   u~ = u + 1/r^2 - 2 ((y_h,rr + y_h,zz) y_h - y_h,r^2 - y_h,z^2) / y_h^2.
Expr transformed_potential_expr(const Expr& u, const Expr& y_h);

// Verifies the seed against u on `grid` (max relative residual below
// `residual_tol`, else VerificationError), then returns the transformed
// potential.
Potential transform_potential(const Potential& u, const SeedSolution& y_h,
                              const ParameterSet& params,
                              const GridSpec& grid = standard_grid(),
                              double residual_tol = 1e-7);

// The h-route: u~ = u + 2 h_rr + 2 h_zz - 1/r^2.  Agrees with
// transform_potential wherever both are defined; kept as a cross-check
// because it needs r y_h > 0.
Potential transform_potential_from_h(const Potential& u, const Expr& h);

// Same as transform_potential but also runs the route cross-check and
// packages the verification report.
TransformStep make_step(const Potential& u, const SeedSolution& y_h,
                        const ParameterSet& params,
                        const GridSpec& grid = standard_grid(),
                        double residual_tol = 1e-7,
                        double equality_tol = 1e-9);

// The transformed equation's counterpart of the background solution:
// Y~ = 1 / (r y_h) solves the transformed potential for every seed.
SeedSolution trivial_partner(const SeedSolution& y_h);

// Pointwise evaluation of a transported solution (convenience wrapper).
double transform_solution(const TransformedSolutionField& field, double r,
                          double z);

// Residual sweep of L[f] = f_rr + f_r/r + f_zz - u f for a numeric field;
// points the transport cannot reach (no singularity-free path) are counted
// as skipped.
ResidualReport residual_report_field(const Potential& u,
                                     const ScalarField2& field,
                                     const GridSpec& grid,
                                     const ParameterSet& params);

// Transforming u~ with the trivial partner returns u; reports the maximum
// relative deviation over the grid (scale max(|u|, |u_back|, 1)).
ResidualReport involution_check(const Potential& u, const SeedSolution& y_h,
                                const GridSpec& grid,
                                const ParameterSet& params);

// A named extra solution transported through every stage of a chain.
struct CarriedSpec {
  std::string name;
  Expr expr;  // closed form solving the chain's initial potential
};

struct ChainOptions {
  GridSpec grid = standard_grid();     // seed verification grid
  double residual_tol = 1e-7;          // closed-form seed tolerance
  double carried_residual_tol = 1e-6;  // transported field tolerance
  double equality_tol = 1e-9;          // route-agreement tolerance
  TransportOptions transport;
  double base_r = 1.0, base_z = 0.0;   // transport basepoint, shared by stages
  std::optional<GridSpec> carried_grid;  // residual grid for carried fields
                                         // (default: ChainOptions::grid)
};

struct CarriedState {
  std::string name;
  std::shared_ptr<const ScalarField2> field;  // after the final stage
  std::vector<ResidualReport> stage_reports;  // one per potential, in order
  // Every representation in order: [0] the initial closed form, [i >= 1] the
  // transported field after stage i.  Lets callers compare each stage with a
  // reference without re-running the pipeline.
  std::vector<std::shared_ptr<const ScalarField2>> stage_fields;
};

struct ChainResult {
  std::vector<TransformStep> steps;
  std::vector<CarriedState> carried;
};

// Applies the transformation once per seed, feeding each stage's output
// potential to the next, and transports every carried solution through every
// stage, re-verifying it against each new potential.  Any verification
// failure aborts with the stage index in the message.
ChainResult chain(const Potential& u0, const std::vector<SeedSolution>& seeds,
                  const std::vector<CarriedSpec>& carried,
                  const ParameterSet& params, const ChainOptions& options);

// Transported solutions are defined up to an overall scalar and a multiple
// of the trivial partner (the homogeneous solution of the defining system).
// gauge_fit_check pins those two constants at two deterministic points, then
// measures the worst relative deviation from `expected` over `n_samples`
// held-out random points in `box` (fixed seed).
struct GaugeFitResult {
  double alpha = 0.0;  // multiplier of the numeric field
  double beta = 0.0;   // multiplier of the gauge expression
  double max_rel_deviation = 0.0;
  long n_checked = 0;
  double worst_r = 0.0, worst_z = 0.0;
};

GaugeFitResult gauge_fit_check(const ScalarField2& numeric,
                               const Expr& expected, const Expr& gauge,
                               const ParameterSet& params, const GridSpec& box,
                               int n_samples = 50, unsigned seed = 20260823);

// Deterministic helper: the lattice point of `box` whose smallest normalized
// factor magnitude is largest, i.e. the point farthest (in that sense) from
// every singular set.  Useful for choosing transport basepoints.
std::pair<double, double> suggest_basepoint(const std::vector<Expr>& factors,
                                            const ParameterSet& params,
                                            const GridSpec& box);

}  // namespace moutard
