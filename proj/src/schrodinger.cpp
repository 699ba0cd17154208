#include "moutard/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "moutard/derivative.hpp"
#include "moutard/detail/grid_reduce.hpp"
#include "moutard/errors.hpp"
#include "moutard/parallel.hpp"
#include "moutard/simplify.hpp"

namespace moutard {

namespace {

using detail::PointOutcome;
using detail::reduce_grid;

// Per-point kernel: evaluates residual and scale expressions, builds the
// outcome.  Skips the point on NearSingular/Domain.
PointOutcome evaluate_point(const std::vector<Expr>& residuals,
                            const std::vector<Expr>& scales, double r, double z,
                            const ParameterSet& params,
                            const GridCompareOptions& options) {
  PointOutcome out;
  try {
    double abs_res = 0.0;
    for (const Expr& e : residuals) {
      Magnitude m =
          evaluate_with_magnitude(e, r, z, params, options.singular_threshold);
      abs_res = std::max(abs_res, std::fabs(m.value));
    }
    double scale = options.scale_floor;
    for (const Expr& e : scales) {
      Magnitude m =
          evaluate_with_magnitude(e, r, z, params, options.singular_threshold);
      scale = std::max(scale, std::fabs(m.value));
    }
    out.status = PointOutcome::Status::Ok;
    out.abs = abs_res;
    out.rel = abs_res / scale;
  } catch (const EvalError& err) {
    if (err.kind == EvalError::Kind::UnboundParameter) {
      out.status = PointOutcome::Status::UnboundParameter;
      out.message = err.what();
    } else {
      out.status = PointOutcome::Status::Skipped;
    }
  } catch (const std::exception& err) {
    out.status = PointOutcome::Status::Failed;
    out.message = err.what();
  }
  return out;
}

}  // namespace

ResidualReport compare_on_grid(const std::vector<Expr>& residuals,
                               const std::vector<Expr>& scales,
                               const GridSpec& grid, const ParameterSet& params,
                               const GridCompareOptions& options) {
  return reduce_grid(grid, [&](double r, double z) {
    return evaluate_point(residuals, scales, r, z, params, options);
  });
}

Expr apply_operator(const Potential& u, const SeedSolution& y) {
  Expr r = var_r();
  Expr y_r = differentiate(y.expr, 'r');
  Expr y_rr = differentiate(y_r, 'r');
  Expr y_zz = differentiate(differentiate(y.expr, 'z'), 'z');
  return simplify(y_rr + y_r / r + y_zz - u.expr * y.expr);
}

ResidualReport residual_report(const Potential& u, const SeedSolution& y,
                               const GridSpec& grid,
                               const ParameterSet& params) {
  Expr r = var_r();
  Expr y_r = differentiate(y.expr, 'r');
  Expr t1 = simplify(differentiate(y_r, 'r'));
  Expr t2 = simplify(y_r / r);
  Expr t3 = simplify(differentiate(differentiate(y.expr, 'z'), 'z'));
  Expr t4 = simplify(u.expr * y.expr);
  Expr residual = simplify(t1 + t2 + t3 - t4);

  GridCompareOptions options;
  options.singular_threshold = std::max(u.singular_threshold,
                                        y.singular_threshold);
  return compare_on_grid({residual}, {t1, t2, t3, t4}, grid, params, options);
}

Potential potential_from_h(const Expr& h) {
  Expr r = var_r();
  Expr one = number(1);
  Expr h_r = differentiate(h, 'r');
  Expr h_rr = differentiate(h_r, 'r');
  Expr h_z = differentiate(h, 'z');
  Expr h_zz = differentiate(h_z, 'z');
  Potential u;
  u.expr = simplify(-h_rr + sq(h_r) + h_r / r + one / sq(r) - h_zz + sq(h_z));
  return u;
}

Expr h_from_seed(const SeedSolution& y_h) {
  return simplify(-ln_(var_r() * y_h.expr));
}

ResidualReport wq_consistency(const SeedSolution& y,
                              const SeedSolution& y_tilde,
                              const SeedSolution& y_h, const GridSpec& grid,
                              const ParameterSet& params) {
  Expr r = var_r();
  Expr yh_r = differentiate(y_h.expr, 'r');
  Expr yh_z = differentiate(y_h.expr, 'z');
  Expr y_r = differentiate(y.expr, 'r');
  Expr y_z = differentiate(y.expr, 'z');
  Expr a = simplify(-(r * (y_z * y_h.expr - y.expr * yh_z)));
  Expr b = simplify(r * (y_r * y_h.expr - y.expr * yh_r));
  Expr q = simplify(r * y_h.expr * y_tilde.expr);
  Expr q_r = differentiate(q, 'r');
  Expr q_z = differentiate(q, 'z');
  Expr res1 = simplify(b - q_z);
  Expr res2 = simplify(q_r - a);

  GridCompareOptions options;
  options.singular_threshold =
      std::max({y.singular_threshold, y_tilde.singular_threshold,
                y_h.singular_threshold});
  return compare_on_grid({res1, res2}, {a, b, q_r, q_z}, grid, params, options);
}

ScanReport scan_expression(const Expr& e, const GridSpec& grid,
                           const ParameterSet& params,
                           double singular_threshold) {
  grid.validate();
  struct Cell {
    enum class Status { Ok, Singular, Domain } status = Status::Domain;
    double value = 0.0;
    bool unbound = false;
    std::string message;
  };
  const long total = grid.total();
  auto cells = parallel_map<Cell>(
      static_cast<std::size_t>(total), [&](std::size_t idx) {
        int i = static_cast<int>(idx) / grid.n_z;
        int j = static_cast<int>(idx) % grid.n_z;
        Cell c;
        try {
          c.value = evaluate(e, grid.r_at(i), grid.z_at(j), params,
                             singular_threshold);
          c.status = Cell::Status::Ok;
        } catch (const EvalError& err) {
          switch (err.kind) {
            case EvalError::Kind::NearSingular:
              c.status = Cell::Status::Singular;
              break;
            case EvalError::Kind::Domain:
              c.status = Cell::Status::Domain;
              break;
            case EvalError::Kind::UnboundParameter:
              c.unbound = true;
              c.message = err.what();
              break;
          }
        }
        return c;
      });

  ScanReport report;
  report.grid = grid;
  bool first = true;
  for (long idx = 0; idx < total; ++idx) {
    const Cell& c = cells[idx];
    if (c.unbound) throw EvalError(EvalError::Kind::UnboundParameter, c.message);
    if (c.status == Cell::Status::Singular) {
      ++report.n_skipped_singular;
      continue;
    }
    if (c.status == Cell::Status::Domain) {
      ++report.n_domain_error;
      continue;
    }
    ++report.n_evaluated;
    int i = static_cast<int>(idx) / grid.n_z;
    int j = static_cast<int>(idx) % grid.n_z;
    if (first || c.value < report.min_value) {
      report.min_value = c.value;
      report.argmin_r = grid.r_at(i);
      report.argmin_z = grid.z_at(j);
    }
    if (first || c.value > report.max_value) {
      report.max_value = c.value;
      report.argmax_r = grid.r_at(i);
      report.argmax_z = grid.z_at(j);
    }
    first = false;
  }
  // Sign changes between evaluated lattice neighbors, row and column wise.
  auto ok = [&](long idx) { return cells[idx].status == Cell::Status::Ok; };
  for (int i = 0; i < grid.n_r; ++i) {
    for (int j = 0; j < grid.n_z; ++j) {
      long idx = long(i) * grid.n_z + j;
      if (!ok(idx)) continue;
      if (i + 1 < grid.n_r) {
        long right = idx + grid.n_z;
        if (ok(right) && cells[idx].value * cells[right].value < 0.0)
          ++report.sign_changes;
      }
      if (j + 1 < grid.n_z) {
        long up = idx + 1;
        if (ok(up) && cells[idx].value * cells[up].value < 0.0)
          ++report.sign_changes;
      }
    }
  }
  report.all_finite = report.n_domain_error == 0 &&
                      report.n_skipped_singular == 0 &&
                      report.n_evaluated == total;
  return report;
}

}  // namespace moutard
