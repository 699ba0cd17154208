#include "moutard/moutard.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "moutard/derivative.hpp"
#include "moutard/detail/grid_reduce.hpp"
#include "moutard/errors.hpp"
#include "moutard/sampling.hpp"
#include "moutard/simplify.hpp"

namespace moutard {

namespace {

std::string format_residual(const ResidualReport& report) {
  std::ostringstream os;
  os << "max relative residual " << report.max_rel_residual << " at (r="
     << report.worst_r << ", z=" << report.worst_z << "), " << report.n_evaluated
     << " points evaluated, " << report.n_skipped_singular << " skipped";
  return os.str();
}

double merged_threshold(const Potential& u, const SeedSolution& y_h) {
  return std::max(u.singular_threshold, y_h.singular_threshold);
}

// Samples random regular points where r y_h is safely positive and compares
// the rational route with the logarithmic h-route.  The two are algebraically
// identical, so any disagreement beyond roundoff is an internal error.
void cross_check_routes(const Potential& u, const SeedSolution& y_h,
                        const Potential& u_tilde, const ParameterSet& params,
                        const GridSpec& grid, double equality_tol) {
  Expr s = simplify(var_r() * y_h.expr);
  Expr h = simplify(-ln_(s));
  Potential via_h = transform_potential_from_h(u, h);
  double threshold = merged_threshold(u, y_h);
  std::vector<Expr> factors = singularity_factors(u_tilde.expr);
  for (const Expr& f : singularity_factors(via_h.expr)) {
    bool seen = false;
    for (const Expr& have : factors)
      if (structurally_equal(have, f)) {
        seen = true;
        break;
      }
    if (!seen) factors.push_back(f);
  }

  std::mt19937 gen(0x6d7472u);
  int valid = 0;
  double worst = 0.0;
  for (int i = 0; i < 200 && valid < 40; ++i) {
    double r = sample_in(gen, grid.r_min, grid.r_max);
    double z = sample_in(gen, grid.z_min, grid.z_max);
    try {
      Magnitude sm = evaluate_with_magnitude(s, r, z, params, threshold);
      if (sm.value < 1e-3 * std::max(1.0, sm.magnitude)) continue;
      // Both routes amplify roundoff near their singular factors; compare
      // only at points where every factor is comfortably away from zero.
      bool clear = true;
      for (const Expr& f : factors) {
        Magnitude fm = evaluate_with_magnitude(f, r, z, params, threshold);
        if (std::fabs(fm.value) < 3e-3 * std::max(1.0, fm.magnitude)) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      double v1 = evaluate(u_tilde.expr, r, z, params, threshold);
      double v2 = evaluate(via_h.expr, r, z, params, threshold);
      double rel = std::fabs(v1 - v2) /
                   std::max({std::fabs(v1), std::fabs(v2), 1.0});
      worst = std::max(worst, rel);
      ++valid;
    } catch (const EvalError& err) {
      if (err.kind == EvalError::Kind::UnboundParameter) throw;
    }
  }
  // The h-route needs r y_h > 0 somewhere in the box; if the seed is negative
  // throughout there is nothing to compare and the rational route stands on
  // its own verification.
  if (valid < 5) return;
  if (worst > equality_tol) {
    std::ostringstream os;
    os << "transformed-potential routes disagree: relative deviation " << worst
       << " between the rational form and the h-route";
    throw NumericalError(os.str());
  }
}

}  // namespace

OneForm make_oneform(const SeedSolution& y, const SeedSolution& y_h) {
  Expr r = var_r();
  Expr y_r = differentiate(y.expr, 'r');
  Expr y_z = differentiate(y.expr, 'z');
  Expr h_r = differentiate(y_h.expr, 'r');
  Expr h_z = differentiate(y_h.expr, 'z');
  OneForm form;
  form.a = simplify(-(r * (y_z * y_h.expr - y.expr * h_z)));
  form.b = simplify(r * (y_r * y_h.expr - y.expr * h_r));
  form.y = y.expr;
  form.y_h = y_h.expr;
  return form;
}

Expr transformed_potential_expr(const Expr& u, const Expr& y_h) {
  Expr r = var_r();
  Expr one = number(1);
  Expr two = number(2);
  Expr h_r = differentiate(y_h, 'r');
  Expr h_z = differentiate(y_h, 'z');
  Expr h_rr = differentiate(h_r, 'r');
  Expr h_zz = differentiate(h_z, 'z');
  Expr bend = (h_rr + h_zz) * y_h - sq(h_r) - sq(h_z);
  return simplify(u + one / sq(r) - two * bend / sq(y_h));
}

Potential transform_potential(const Potential& u, const SeedSolution& y_h,
                              const ParameterSet& params, const GridSpec& grid,
                              double residual_tol) {
  ResidualReport report = residual_report(u, y_h, grid, params);
  if (!(report.max_rel_residual <= residual_tol))
    throw VerificationError(
        "seed is not a solution of the given potential: " +
        format_residual(report));
  Potential out;
  out.expr = transformed_potential_expr(u.expr, y_h.expr);
  out.singular_threshold = merged_threshold(u, y_h);
  return out;
}

Potential transform_potential_from_h(const Potential& u, const Expr& h) {
  Expr r = var_r();
  Expr one = number(1);
  Expr two = number(2);
  Expr h_rr = differentiate(differentiate(h, 'r'), 'r');
  Expr h_zz = differentiate(differentiate(h, 'z'), 'z');
  Potential out;
  out.expr = simplify(u.expr + two * h_rr + two * h_zz - one / sq(r));
  out.singular_threshold = u.singular_threshold;
  return out;
}

TransformStep make_step(const Potential& u, const SeedSolution& y_h,
                        const ParameterSet& params, const GridSpec& grid,
                        double residual_tol, double equality_tol) {
  ResidualReport report = residual_report(u, y_h, grid, params);
  if (!(report.max_rel_residual <= residual_tol))
    throw VerificationError(
        "seed is not a solution of the given potential: " +
        format_residual(report));
  TransformStep step;
  step.u = u;
  step.y_h = y_h;
  step.params = params;
  step.verified = report;
  step.u_tilde.expr = transformed_potential_expr(u.expr, y_h.expr);
  step.u_tilde.singular_threshold = merged_threshold(u, y_h);
  cross_check_routes(u, y_h, step.u_tilde, params, grid, equality_tol);
  return step;
}

SeedSolution trivial_partner(const SeedSolution& y_h) {
  SeedSolution out;
  out.expr = simplify(number(1) / (var_r() * y_h.expr));
  out.singular_threshold = y_h.singular_threshold;
  return out;
}

double transform_solution(const TransformedSolutionField& field, double r,
                          double z) {
  return field.value(r, z);
}

ResidualReport residual_report_field(const Potential& u,
                                     const ScalarField2& field,
                                     const GridSpec& grid,
                                     const ParameterSet& params) {
  return detail::reduce_grid(grid, [&](double r, double z) {
    detail::PointOutcome out;
    try {
      Eval2 e = field.eval2(r, z);
      double uv = evaluate(u.expr, r, z, params, u.singular_threshold);
      double t1 = e.frr;
      double t2 = e.fr / r;
      double t3 = e.fzz;
      double t4 = uv * e.f;
      double abs_res = std::fabs(t1 + t2 + t3 - t4);
      double scale = std::max({std::fabs(t1), std::fabs(t2), std::fabs(t3),
                               std::fabs(t4), 1e-30});
      out.status = detail::PointOutcome::Status::Ok;
      out.abs = abs_res;
      out.rel = abs_res / scale;
    } catch (const EvalError& err) {
      if (err.kind == EvalError::Kind::UnboundParameter) {
        out.status = detail::PointOutcome::Status::UnboundParameter;
        out.message = err.what();
      } else {
        out.status = detail::PointOutcome::Status::Skipped;
      }
    } catch (const NumericalError&) {
      // Unreachable targets (no singularity-free path) and exhausted
      // quadrature count as singular skips, exactly like closed-form poles.
      out.status = detail::PointOutcome::Status::Skipped;
    } catch (const std::exception& err) {
      out.status = detail::PointOutcome::Status::Failed;
      out.message = err.what();
    }
    return out;
  });
}

ResidualReport involution_check(const Potential& u, const SeedSolution& y_h,
                                const GridSpec& grid,
                                const ParameterSet& params) {
  Expr u_tilde = transformed_potential_expr(u.expr, y_h.expr);
  Expr partner = trivial_partner(y_h).expr;
  Expr u_back = transformed_potential_expr(u_tilde, partner);
  Expr deviation = simplify(u_back - u.expr);
  GridCompareOptions options;
  options.singular_threshold = merged_threshold(u, y_h);
  return compare_on_grid({deviation}, {u.expr, u_back, number(1)}, grid, params,
                         options);
}

ChainResult chain(const Potential& u0, const std::vector<SeedSolution>& seeds,
                  const std::vector<CarriedSpec>& carried,
                  const ParameterSet& params, const ChainOptions& options) {
  ChainResult result;
  Potential current = u0;

  GridSpec carried_grid;
  if (options.carried_grid) {
    carried_grid = *options.carried_grid;
  } else {
    // Numeric re-verification is far costlier per point than closed-form
    // sweeps; thin the default grid rather than silently skipping the check.
    carried_grid = options.grid;
    carried_grid.n_r = std::min(carried_grid.n_r, 15);
    carried_grid.n_z = std::min(carried_grid.n_z, 15);
  }

  for (const CarriedSpec& spec : carried) {
    CarriedState state;
    state.name = spec.name;
    SeedSolution as_seed{simplify(spec.expr), {}, u0.singular_threshold};
    ResidualReport report =
        residual_report(u0, as_seed, options.grid, params);
    if (!(report.max_rel_residual <= options.residual_tol))
      throw VerificationError("carried solution '" + spec.name +
                              "' does not solve the initial potential: " +
                              format_residual(report));
    state.stage_reports.push_back(report);
    state.field = std::make_shared<ClosedFormField>(as_seed.expr, params,
                                                    u0.singular_threshold);
    state.stage_fields.push_back(state.field);
    result.carried.push_back(std::move(state));
  }

  for (std::size_t stage = 0; stage < seeds.size(); ++stage) {
    TransformStep step;
    try {
      step = make_step(current, seeds[stage], params, options.grid,
                       options.residual_tol, options.equality_tol);
    } catch (const VerificationError& err) {
      throw VerificationError("stage " + std::to_string(stage) + ": " +
                              err.what());
    }

    auto yh_field = std::make_shared<ClosedFormField>(
        seeds[stage].expr, params, step.u_tilde.singular_threshold);
    for (CarriedState& state : result.carried) {
      TransportOptions transport = options.transport;
      auto moved = std::make_shared<TransformedSolutionField>(
          state.field, yh_field, options.base_r, options.base_z, 0.0,
          transport);
      ResidualReport report =
          residual_report_field(step.u_tilde, *moved, carried_grid, params);
      if (!(report.max_rel_residual <= options.carried_residual_tol))
        throw VerificationError(
            "stage " + std::to_string(stage) + ": carried solution '" +
            state.name + "' failed re-verification: " + format_residual(report));
      state.stage_reports.push_back(report);
      state.field = moved;
      state.stage_fields.push_back(moved);
    }

    current = step.u_tilde;
    result.steps.push_back(std::move(step));
  }
  return result;
}

GaugeFitResult gauge_fit_check(const ScalarField2& numeric,
                               const Expr& expected, const Expr& gauge,
                               const ParameterSet& params, const GridSpec& box,
                               int n_samples, unsigned seed) {
  struct Sample {
    double n, t, e, r, z;
  };
  auto probe = [&](double r, double z, Sample& out) {
    try {
      out.n = numeric.value(r, z);
      out.t = evaluate(gauge, r, z, params);
      out.e = evaluate(expected, r, z, params);
      out.r = r;
      out.z = z;
      return true;
    } catch (const EvalError& err) {
      if (err.kind == EvalError::Kind::UnboundParameter) throw;
      return false;
    } catch (const NumericalError&) {
      return false;
    }
  };

  // Deterministic fit points: fractions of the box, first well-conditioned
  // pair wins.
  constexpr double kFractions[][2] = {{0.3, 0.3},  {0.7, 0.7}, {0.25, 0.6},
                                      {0.6, 0.25}, {0.45, 0.8}, {0.8, 0.45},
                                      {0.15, 0.5}, {0.5, 0.15}};
  std::vector<Sample> anchors;
  for (const auto& f : kFractions) {
    Sample s{};
    double r = box.r_min + f[0] * (box.r_max - box.r_min);
    double z = box.z_min + f[1] * (box.z_max - box.z_min);
    if (probe(r, z, s)) anchors.push_back(s);
  }
  double alpha = 0.0, beta = 0.0;
  bool fitted = false;
  for (std::size_t i = 0; i < anchors.size() && !fitted; ++i) {
    for (std::size_t j = i + 1; j < anchors.size() && !fitted; ++j) {
      const Sample& p = anchors[i];
      const Sample& q = anchors[j];
      double det = p.n * q.t - q.n * p.t;
      double scale = std::fabs(p.n * q.t) + std::fabs(q.n * p.t) + 1e-300;
      if (std::fabs(det) <= 1e-10 * scale) continue;
      alpha = (p.e * q.t - q.e * p.t) / det;
      beta = (p.n * q.e - q.n * p.e) / det;
      fitted = true;
    }
  }
  if (!fitted)
    throw NumericalError(
        "gauge fit: no well-conditioned pair of fit points in the box");

  std::mt19937 gen(seed);
  std::vector<Sample> held_out;
  for (int i = 0; i < n_samples; ++i) {
    double r = sample_in(gen, box.r_min, box.r_max);
    double z = sample_in(gen, box.z_min, box.z_max);
    Sample s{};
    if (probe(r, z, s)) held_out.push_back(s);
  }
  if (held_out.empty())
    throw NumericalError("gauge fit: no usable held-out sample points");

  double scale_box = 1e-30;
  for (const Sample& s : held_out)
    scale_box = std::max(scale_box, std::fabs(s.e));

  GaugeFitResult result;
  result.alpha = alpha;
  result.beta = beta;
  result.n_checked = static_cast<long>(held_out.size());
  for (const Sample& s : held_out) {
    double dev = std::fabs(alpha * s.n + beta * s.t - s.e) /
                 std::max(std::fabs(s.e), 1e-3 * scale_box);
    if (dev > result.max_rel_deviation) {
      result.max_rel_deviation = dev;
      result.worst_r = s.r;
      result.worst_z = s.z;
    }
  }
  return result;
}

std::pair<double, double> suggest_basepoint(const std::vector<Expr>& factors,
                                            const ParameterSet& params,
                                            const GridSpec& box) {
  box.validate();
  double best_score = -1.0;
  std::pair<double, double> best{box.r_min, box.z_min};
  for (int i = 0; i < box.n_r; ++i) {
    for (int j = 0; j < box.n_z; ++j) {
      double r = box.r_at(i);
      double z = box.z_at(j);
      double score = 1e300;
      bool usable = true;
      for (const Expr& f : factors) {
        try {
          Magnitude m = evaluate_with_magnitude(f, r, z, params);
          score = std::min(score,
                           std::fabs(m.value) / std::max(1.0, m.magnitude));
        } catch (const EvalError& err) {
          if (err.kind == EvalError::Kind::UnboundParameter) throw;
          usable = false;
          break;
        }
      }
      if (usable && score > best_score) {
        best_score = score;
        best = {r, z};
      }
    }
  }
  if (best_score < 0.0)
    throw NumericalError("no usable basepoint in the given box");
  return best;
}

}  // namespace moutard
