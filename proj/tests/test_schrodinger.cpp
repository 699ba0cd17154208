#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "moutard/errors.hpp"
#include "moutard/eval.hpp"
#include "moutard/moutard.hpp"
#include "moutard/parse.hpp"
#include "moutard/schrodinger.hpp"
#include "moutard/simplify.hpp"

using namespace moutard;

namespace {

Potential potential(const char* text) { return Potential{parse(text), {}, 1e-8}; }
SeedSolution seed(const char* text) { return SeedSolution{parse(text), {}, 1e-8}; }

}  // namespace

TEST_CASE("exact solutions have zero residual") {
  CHECK(residual_report(potential("0"), seed("r^2 - 2*z^2"), standard_grid(), {})
            .max_rel_residual < 1e-14);
  ParameterSet k{{"k", 1.7}};
  CHECK(residual_report(potential("-k^2"), seed("sin(k*z)"), standard_grid(), k)
            .max_rel_residual < 1e-13);
  CHECK(residual_report(potential("-k^2"), seed("cos(k*z)"), standard_grid(), k)
            .max_rel_residual < 1e-13);
  // 1/sqrt(r^2+z^2) is harmonic away from the origin.
  CHECK(residual_report(potential("0"), seed("1/sqrt(r^2+z^2)"),
                        GridSpec{0.2, 3.0, 0.5, 3.0, 40, 40}, {})
            .max_rel_residual < 1e-13);
}

TEST_CASE("a non-solution is measured at order one") {
  // The operator applied to Y = r gives 1/r, and the scale of the four
  // operator terms at these points is also ~ 1/r: relative residual ~ 1.
  ResidualReport report =
      residual_report(potential("0"), seed("r"), standard_grid(), {});
  CHECK(report.max_rel_residual > 0.5);
}

TEST_CASE("apply_operator is linear") {
  Expr f = parse("sin(z) * r^2");
  Expr g = parse("1/sqrt(r^2+z^2)");
  Potential u = potential("1/r^2");
  Expr combined = simplify(parse("3") * f - parse("2") * g);
  Expr lhs = apply_operator(u, SeedSolution{combined, {}, 1e-8});
  Expr rhs = simplify(parse("3") * apply_operator(u, SeedSolution{f, {}, 1e-8}) -
                      parse("2") * apply_operator(u, SeedSolution{g, {}, 1e-8}));
  for (double r : {0.4, 1.1, 2.6}) {
    for (double z : {0.3, 1.4}) {
      CHECK(evaluate(lhs, r, z, {}) ==
            doctest::Approx(evaluate(rhs, r, z, {})).epsilon(1e-12));
    }
  }
}

TEST_CASE("h representation round-trips through the seed form") {
  // Where r y_h > 0 the logarithmic form h = -ln(r y_h) carries the same
  // information: the potential built from h admits y_h as a solution.
  Expr y_h = parse("r^2 - 2*z^2");
  Expr h = h_from_seed(seed("r^2 - 2*z^2"));
  Potential u = potential_from_h(h);
  // Positive-seed region only (r^2 > 2 z^2).
  ResidualReport report = residual_report(
      u, seed("r^2 - 2*z^2"), GridSpec{1.0, 3.0, 0.05, 0.45, 30, 30}, {});
  CHECK(report.max_rel_residual < 1e-12);
  (void)y_h;
}

TEST_CASE("one-form consistency ties A, B to the mixed partials of P") {
  // Known triple for the free equation: Y = z, Y_h = r^2 - 2 z^2, and the
  // product P = r Y_h Y~ with Y~ = -(4 r^2 z^2 + r^4)/(4 r (r^2 - 2 z^2)).
  SeedSolution y = seed("z");
  SeedSolution y_h = seed("r^2 - 2*z^2");
  SeedSolution y_t = seed("-((4*r^2*z^2 + r^4)/(4*r*(r^2 - 2*z^2)))");
  ResidualReport report = wq_consistency(y, y_t, y_h, standard_grid(), {});
  CHECK(report.max_rel_residual < 1e-8);
}

TEST_CASE("compare_on_grid skips near-singular points and reports them") {
  // 1/(r - 1) has a singular vertical line inside the grid; the residual
  // scale is the function itself, so points adjacent to r = 1 get skipped
  // only when the denominator loses its digits.
  Expr res = parse("1/(r-1) - 1/(r-1)");
  Expr scale = parse("1/(r-1)");
  // r runs 0.9999 .. 1.0001 over 21 points: the middle column lands on r = 1
  // to rounding (|r - 1| ~ 1e-16, below the 1e-8 relative threshold) and must
  // be skipped; its neighbors at |r - 1| = 1e-5 must not be.
  GridSpec grid{0.9999, 1.0001, -1.0, 1.0, 21, 5};
  ResidualReport report = compare_on_grid({res}, {scale}, grid, {}, {});
  CHECK(report.n_skipped_singular > 0);
  CHECK(report.n_evaluated + report.n_skipped_singular == grid.total());
}

TEST_CASE("an entirely singular grid is an error, not a vacuous pass") {
  Expr res = parse("1/(r-1)");
  GridSpec grid{1.0 - 1e-13, 1.0 + 1e-13, -1.0, 1.0, 5, 5};
  CHECK_THROWS_AS(compare_on_grid({res}, {res}, grid, {}, {}),
                  NumericalError);
}

TEST_CASE("unbound parameters surface as errors from grid sweeps") {
  CHECK_THROWS_AS(
      residual_report(potential("-k^2"), seed("sin(k*z)"), standard_grid(), {}),
      EvalError);
}

TEST_CASE("scan_expression reports extrema, sign changes and finiteness") {
  ScanReport rz = scan_expression(parse("r^2 + z^2"),
                                  GridSpec{0.5, 2.0, -1.0, 1.0, 16, 21}, {});
  CHECK(rz.all_finite);
  CHECK(rz.min_value == doctest::Approx(0.25 + 0.01).epsilon(0.2));
  CHECK(rz.argmin_r == doctest::Approx(0.5));
  CHECK(rz.max_value == doctest::Approx(5.0));
  CHECK(rz.sign_changes == 0);

  // z changes sign once per column; no exact zeros on this lattice.
  ScanReport sz = scan_expression(parse("z"),
                                  GridSpec{0.5, 2.0, -1.0, 1.0, 16, 20}, {});
  CHECK(sz.sign_changes == 16);

  // A pole inside the grid: skipped points and all_finite = false.
  ScanReport pole =
      scan_expression(parse("1/(r-1)"),
                      GridSpec{1.0 - 1e-10, 1.0 + 1e-10, -1.0, 1.0, 9, 3}, {});
  CHECK_FALSE(pole.all_finite);
  CHECK(pole.n_skipped_singular > 0);
}

TEST_CASE("scan flags domain violations without aborting the sweep") {
  // ln(z) is undefined on half the grid.
  ScanReport report = scan_expression(
      parse("ln(z)"), GridSpec{0.5, 2.0, -1.0, 1.0, 6, 10}, {});
  CHECK(report.n_domain_error > 0);
  CHECK_FALSE(report.all_finite);
  CHECK(report.n_evaluated + report.n_domain_error +
            report.n_skipped_singular ==
        long(6) * 10);
}

TEST_CASE("residual reports locate the worst point") {
  // The report's worst point must reproduce the reported maximum when the
  // operator is re-applied there by hand.
  ResidualReport report =
      residual_report(potential("0"), seed("r"), standard_grid(), {});
  Expr res = apply_operator(potential("0"), seed("r"));
  double at_worst =
      std::fabs(evaluate(res, report.worst_r, report.worst_z, {}));
  CHECK(at_worst == doctest::Approx(report.max_abs_residual).epsilon(1e-12));
}
