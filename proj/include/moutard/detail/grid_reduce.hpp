#pragma once

#include <algorithm>
#include <string>

#include "moutard/errors.hpp"
#include "moutard/grid.hpp"
#include "moutard/parallel.hpp"
#include "moutard/schrodinger.hpp"

namespace moutard::detail {

// Per-point outcome of a residual sweep.  Failures that must abort the sweep
// (unbound parameter, unexpected exception) are carried out of the worker
// and rethrown during the ordered reduction.
struct PointOutcome {
  enum class Status { Ok, Skipped, UnboundParameter, Failed };
  Status status = Status::Skipped;
  double abs = 0.0;
  double rel = 0.0;
  std::string message;
};

// Evaluates `fn` over the whole grid (r-major: index = i * n_z + j) and folds
// the outcomes in index order, so the report does not depend on the thread
// count.  `fn` receives (r, z) and must not throw.
template <typename Fn>
ResidualReport reduce_grid(const GridSpec& grid, Fn&& fn) {
  grid.validate();
  const long total = grid.total();
  auto outcomes = parallel_map<PointOutcome>(
      static_cast<std::size_t>(total), [&](std::size_t idx) {
        int i = static_cast<int>(idx) / grid.n_z;
        int j = static_cast<int>(idx) % grid.n_z;
        return fn(grid.r_at(i), grid.z_at(j));
      });

  ResidualReport report;
  report.grid = grid;
  bool have_worst = false;
  for (long idx = 0; idx < total; ++idx) {
    const PointOutcome& o = outcomes[idx];
    switch (o.status) {
      case PointOutcome::Status::Ok: {
        ++report.n_evaluated;
        report.max_abs_residual = std::max(report.max_abs_residual, o.abs);
        if (!have_worst || o.rel > report.max_rel_residual) {
          have_worst = true;
          report.max_rel_residual = o.rel;
          int i = static_cast<int>(idx) / grid.n_z;
          int j = static_cast<int>(idx) % grid.n_z;
          report.worst_r = grid.r_at(i);
          report.worst_z = grid.z_at(j);
        }
        break;
      }
      case PointOutcome::Status::Skipped:
        ++report.n_skipped_singular;
        break;
      case PointOutcome::Status::UnboundParameter:
        throw EvalError(EvalError::Kind::UnboundParameter, o.message);
      case PointOutcome::Status::Failed:
        throw NumericalError(o.message);
    }
  }
  if (report.n_evaluated == 0)
    throw NumericalError(
        "empty verification domain: every grid point was singular or out of "
        "domain");
  return report;
}

}  // namespace moutard::detail
