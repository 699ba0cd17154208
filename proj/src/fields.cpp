#include "moutard/fields.hpp"

#include <algorithm>
#include <cmath>

#include "moutard/derivative.hpp"
#include "moutard/errors.hpp"
#include "moutard/simplify.hpp"

namespace moutard {

namespace {

void push_unique(std::vector<Expr>& out, const Expr& e) {
  for (const Expr& have : out)
    if (structurally_equal(have, e)) return;
  out.push_back(e);
}

// Keep only factors that actually vary over the half-plane; a factor with no
// r or z dependence is either never zero or uniformly zero, and the latter
// fails at the first evaluation anyway.
bool depends_on_point(const Expr& e) {
  auto syms = free_symbols(e);
  return syms.count("r") > 0 || syms.count("z") > 0;
}

void collect_factors(const Expr& e, std::vector<Expr>& out) {
  if (!e) return;
  switch (e->kind) {
    case NodeKind::Div:
      collect_factors(e->a, out);
      collect_factors(e->b, out);
      push_unique(out, simplify(e->b));
      return;
    case NodeKind::Pow:
      collect_factors(e->a, out);
      if (e->exponent < 0) push_unique(out, simplify(e->a));
      return;
    case NodeKind::Tan:
      collect_factors(e->a, out);
      push_unique(out, simplify(cos_(e->a)));
      return;
    case NodeKind::Cot:
      collect_factors(e->a, out);
      push_unique(out, simplify(sin_(e->a)));
      return;
    case NodeKind::Ln:
    case NodeKind::Sqrt:
      collect_factors(e->a, out);
      push_unique(out, simplify(e->a));
      return;
    default:
      if (e->a) collect_factors(e->a, out);
      if (e->b) collect_factors(e->b, out);
      return;
  }
}

}  // namespace

std::vector<Expr> singularity_factors(const Expr& e) {
  std::vector<Expr> raw;
  collect_factors(e, raw);
  std::vector<Expr> out;
  for (const Expr& f : raw)
    if (depends_on_point(f)) push_unique(out, f);
  return out;
}

ClosedFormField::ClosedFormField(Expr e, ParameterSet params,
                                 double singular_threshold)
    : e_(simplify(e)),
      params_(std::move(params)),
      threshold_(singular_threshold) {
  er_ = differentiate(e_, 'r');
  ez_ = differentiate(e_, 'z');
  err_ = differentiate(er_, 'r');
  erz_ = differentiate(er_, 'z');
  ezz_ = differentiate(ez_, 'z');
  for (const Expr& part : {e_, er_, ez_, err_, erz_, ezz_})
    for (const Expr& f : singularity_factors(part)) push_unique(factors_, f);
}

Eval2 ClosedFormField::eval2(double r, double z) const {
  Eval2 out;
  out.f = evaluate(e_, r, z, params_, threshold_);
  out.fr = evaluate(er_, r, z, params_, threshold_);
  out.fz = evaluate(ez_, r, z, params_, threshold_);
  out.frr = evaluate(err_, r, z, params_, threshold_);
  out.frz = evaluate(erz_, r, z, params_, threshold_);
  out.fzz = evaluate(ezz_, r, z, params_, threshold_);
  return out;
}

double ClosedFormField::value(double r, double z) const {
  return evaluate(e_, r, z, params_, threshold_);
}

std::vector<Expr> ClosedFormField::singular_factors() const { return factors_; }

TransformedSolutionField::TransformedSolutionField(
    std::shared_ptr<const ScalarField2> y,
    std::shared_ptr<const ClosedFormField> y_h, double base_r, double base_z,
    double additive_constant, TransportOptions options)
    : y_(std::move(y)),
      y_h_(std::move(y_h)),
      base_r_(base_r),
      base_z_(base_z),
      additive_constant_(additive_constant),
      options_(std::move(options)) {
  s_ = simplify(var_r() * y_h_->expr());
  s_r_ = differentiate(s_, 'r');
  s_z_ = differentiate(s_, 'z');
  s_rr_ = differentiate(s_r_, 'r');
  s_rz_ = differentiate(s_r_, 'z');
  s_zz_ = differentiate(s_z_, 'z');

  // The transport integrand A, B involves Y, Y_h, and their first partials:
  // it fails where the carried field's values fail or where Y_h's closed
  // forms do.  Zeros of Y_h itself do not obstruct the integral - only the
  // final division by r Y_h - so they are excluded from path planning but
  // included in the factors exported to downstream consumers.
  for (const Expr& f : y_->singular_factors()) push_unique(plan_factors_, f);
  for (const Expr& f : y_h_->singular_factors()) push_unique(plan_factors_, f);

  value_factors_ = plan_factors_;
  if (depends_on_point(y_h_->expr()))
    push_unique(value_factors_, simplify(y_h_->expr()));
  push_unique(value_factors_, var_r());
}

bool TransformedSolutionField::point_usable(double r, double z) const {
  if (!(r > 1e-6)) return false;
  for (const Expr& f : plan_factors_) {
    try {
      Magnitude m = evaluate_with_magnitude(f, r, z, params(),
                                            options_.singular_threshold);
      if (std::fabs(m.value) <
          options_.probe_threshold * std::max(1.0, m.magnitude))
        return false;
    } catch (const EvalError& err) {
      if (err.kind == EvalError::Kind::UnboundParameter) throw;
      return false;
    }
  }
  return true;
}

bool TransformedSolutionField::segment_usable(double r0, double z0, double r1,
                                              double z1) const {
  constexpr int kSamples = 33;
  for (int i = 0; i < kSamples; ++i) {
    double t = double(i) / double(kSamples - 1);
    if (!point_usable(r0 + t * (r1 - r0), z0 + t * (z1 - z0))) return false;
  }
  // Sign uniformity of each factor along the segment: a sign flip between
  // samples means the factor's zero set crosses the segment even if every
  // sample individually clears the magnitude bar.
  for (const Expr& f : plan_factors_) {
    int sign = 0;
    for (int i = 0; i < kSamples; ++i) {
      double t = double(i) / double(kSamples - 1);
      double v;
      try {
        v = evaluate(f, r0 + t * (r1 - r0), z0 + t * (z1 - z0), params(),
                     options_.singular_threshold);
      } catch (const EvalError& err) {
        if (err.kind == EvalError::Kind::UnboundParameter) throw;
        return false;
      }
      int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
      if (s == 0) return false;
      if (sign == 0) sign = s;
      if (s != sign) return false;
    }
  }
  return true;
}

PathPlan TransformedSolutionField::plan_to(double r, double z) const {
  GridSpec hint;
  if (options_.plan_hint) {
    hint = *options_.plan_hint;
  } else {
    double d = std::max({std::fabs(r - base_r_), std::fabs(z - base_z_), 1.0});
    hint.r_min = std::max(std::min(base_r_, r) - 0.5 * d, 1e-6);
    hint.r_max = std::max(base_r_, r) + 0.5 * d;
    hint.z_min = std::min(base_z_, z) - 0.5 * d;
    hint.z_max = std::max(base_z_, z) + 0.5 * d;
    hint.n_r = options_.plan_resolution;
    hint.n_z = options_.plan_resolution;
  }
  auto point_ok = [this](double pr, double pz) { return point_usable(pr, pz); };
  auto segment_ok = [this](double r0, double z0, double r1, double z1) {
    return segment_usable(r0, z0, r1, z1);
  };
  return plan_path(base_r_, base_z_, r, z, point_ok, segment_ok, hint);
}

OneFormValues TransformedSolutionField::one_form_at(double r, double z) const {
  Eval2 y = y_->eval2(r, z);
  Eval2 h = y_h_->eval2(r, z);
  OneFormValues w;
  w.a = -r * (y.fz * h.f - y.f * h.fz);
  w.b = r * (y.fr * h.f - y.f * h.fr);
  w.a_r = -(y.fz * h.f - y.f * h.fz) -
          r * (y.frz * h.f + y.fz * h.fr - y.fr * h.fz - y.f * h.frz);
  w.a_z = -r * (y.fzz * h.f - y.f * h.fzz);
  w.b_z = r * (y.frz * h.f + y.fr * h.fz - y.fz * h.fr - y.f * h.frz);
  return w;
}

double TransformedSolutionField::accumulated(double r, double z) const {
  std::pair<double, double> key(r, z);
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = p_cache_.find(key);
    if (it != p_cache_.end()) return it->second;
  }
  double p;
  if (r == base_r_ && z == base_z_) {
    p = additive_constant_;
  } else {
    PathPlan plan = plan_to(r, z);
    auto a_fn = [this](double pr, double pz) { return one_form_at(pr, pz).a; };
    auto b_fn = [this](double pr, double pz) { return one_form_at(pr, pz).b; };
    QuadratureResult q = line_integral(a_fn, b_fn, plan, options_.quad_tol);
    p = additive_constant_ + q.value;
  }
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    p_cache_.emplace(key, p);
  }
  return p;
}

double TransformedSolutionField::value(double r, double z) const {
  Magnitude s = evaluate_with_magnitude(s_, r, z, params(),
                                        options_.singular_threshold);
  if (std::fabs(s.value) <
      options_.singular_threshold * std::max(1.0, s.magnitude))
    throw EvalError(EvalError::Kind::NearSingular,
                    "transformed solution: r*y_h vanishes at the target");
  return accumulated(r, z) / s.value;
}

Eval2 TransformedSolutionField::eval2(double r, double z) const {
  Magnitude s = evaluate_with_magnitude(s_, r, z, params(),
                                        options_.singular_threshold);
  if (std::fabs(s.value) <
      options_.singular_threshold * std::max(1.0, s.magnitude))
    throw EvalError(EvalError::Kind::NearSingular,
                    "transformed solution: r*y_h vanishes at the target");
  double sv = s.value;
  double sr = evaluate(s_r_, r, z, params(), options_.singular_threshold);
  double sz = evaluate(s_z_, r, z, params(), options_.singular_threshold);
  double srr = evaluate(s_rr_, r, z, params(), options_.singular_threshold);
  double srz = evaluate(s_rz_, r, z, params(), options_.singular_threshold);
  double szz = evaluate(s_zz_, r, z, params(), options_.singular_threshold);
  double p = accumulated(r, z);
  OneFormValues w = one_form_at(r, z);

  Eval2 out;
  out.f = p / sv;
  out.fr = (w.a - out.f * sr) / sv;
  out.fz = (w.b - out.f * sz) / sv;
  out.frr = (w.a_r - 2.0 * out.fr * sr - out.f * srr) / sv;
  out.frz = (w.a_z - out.fr * sz - out.fz * sr - out.f * srz) / sv;
  out.fzz = (w.b_z - 2.0 * out.fz * sz - out.f * szz) / sv;
  return out;
}

std::vector<Expr> TransformedSolutionField::singular_factors() const {
  return value_factors_;
}

}  // namespace moutard
