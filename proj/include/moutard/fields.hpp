#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "moutard/eval.hpp"
#include "moutard/expr.hpp"
#include "moutard/grid.hpp"
#include "moutard/quadrature.hpp"

namespace moutard {

// Value and partial derivatives up to second order at one point.
struct Eval2 {
  double f = 0.0;
  double fr = 0.0, fz = 0.0;
  double frr = 0.0, frz = 0.0, fzz = 0.0;
};

// A twice-differentiable scalar field on the (r, z) half-plane.  Closed-form
// expressions and numerically transported solutions share this interface so
// transformations can be chained without symbolic antiderivatives.
class ScalarField2 {
 public:
  virtual ~ScalarField2() = default;
  virtual Eval2 eval2(double r, double z) const = 0;
  virtual double value(double r, double z) const { return eval2(r, z).f; }
  // Closed-form expressions whose zero sets mark where this field's values
  // stop being usable (denominators, function-domain boundaries).  Path
  // planners sample these to keep integration routes clear.
  virtual std::vector<Expr> singular_factors() const = 0;
};

// Collects the subexpressions of `e` whose zeros make evaluation singular:
// divisor of every quotient, base of every negative power, cos of a tan
// argument, sin of a cot argument, and the arguments of ln and sqrt.
// Constant-in-(r,z) factors are dropped; duplicates are removed.
std::vector<Expr> singularity_factors(const Expr& e);

// Field backed by one expression; the five partials are differentiated and
// simplified once at construction.
class ClosedFormField : public ScalarField2 {
 public:
  ClosedFormField(Expr e, ParameterSet params, double singular_threshold = 1e-8);
  Eval2 eval2(double r, double z) const override;
  double value(double r, double z) const override;
  std::vector<Expr> singular_factors() const override;

  const Expr& expr() const { return e_; }
  const ParameterSet& params() const { return params_; }
  double singular_threshold() const { return threshold_; }

 private:
  Expr e_, er_, ez_, err_, erz_, ezz_;
  ParameterSet params_;
  double threshold_;
  std::vector<Expr> factors_;
};

struct TransportOptions {
  double quad_tol = 1e-9;          // relative tolerance per line integral
  double singular_threshold = 1e-8;
  double probe_threshold = 1e-6;   // path probe: |factor| must exceed this
                                   // times max(1, running magnitude)
  int plan_resolution = 41;        // staircase lattice lines per axis
  std::optional<GridSpec> plan_hint;  // staircase search box; inferred from
                                      // base/target when unset
};

// One-form components and the derivatives needed for second-order evaluation
// of the transported solution.  With P the accumulated potential-like
// variable, a = P_r, b = P_z, and (a_r, a_z, b_z) complete the Hessian of P
// (a_z == b_r by closedness).
struct OneFormValues {
  double a = 0.0, b = 0.0;
  double a_r = 0.0, a_z = 0.0, b_z = 0.0;
};

// Numerically transported solution Y~ = P / (r Y_h), where
//   dP = A dr + B dz,  A = -r (Y_z Y_h - Y Y_h,z),  B = r (Y_r Y_h - Y Y_h,r),
// P(basepoint) = additive_constant, and P is accumulated by adaptive line
// integration along singularity-avoiding axis-parallel paths.  Y may itself
// be a transported field, which is how repeated transformations carry
// solutions forward.  P values are cached per exact target point; the cache
// is mutex-guarded and results are independent of evaluation order.
class TransformedSolutionField : public ScalarField2 {
 public:
  TransformedSolutionField(std::shared_ptr<const ScalarField2> y,
                           std::shared_ptr<const ClosedFormField> y_h,
                           double base_r, double base_z,
                           double additive_constant = 0.0,
                           TransportOptions options = {});

  Eval2 eval2(double r, double z) const override;
  double value(double r, double z) const override;
  std::vector<Expr> singular_factors() const override;

  // Accumulated P(r, z) = additive_constant + line integral from basepoint.
  double accumulated(double r, double z) const;
  // Exact one-form values at a point (independent of any path).
  OneFormValues one_form_at(double r, double z) const;
  // The deterministic route the transport would take to (r, z).
  PathPlan plan_to(double r, double z) const;

  double base_r() const { return base_r_; }
  double base_z() const { return base_z_; }
  const ParameterSet& params() const { return y_h_->params(); }

 private:
  bool point_usable(double r, double z) const;
  bool segment_usable(double r0, double z0, double r1, double z1) const;

  std::shared_ptr<const ScalarField2> y_;
  std::shared_ptr<const ClosedFormField> y_h_;
  double base_r_, base_z_;
  double additive_constant_;
  TransportOptions options_;
  // Denominator S = r y_h and its partials, for the final quotient.
  Expr s_, s_r_, s_z_, s_rr_, s_rz_, s_zz_;
  std::vector<Expr> plan_factors_;   // where the transport integrand fails
  std::vector<Expr> value_factors_;  // where this field's values fail
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<double, double>, double> p_cache_;
};

}  // namespace moutard
