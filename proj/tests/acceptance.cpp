// Acceptance gate: nine numbered criteria, one PASS/FAIL line each, exit 0
// only when every one holds.  Tolerances and runtimes are pinned here and
// must not be loosened to make a failing build pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "moutard/catalog.hpp"
#include "moutard/derivative.hpp"
#include "moutard/errors.hpp"
#include "moutard/eval.hpp"
#include "moutard/fields.hpp"
#include "moutard/hyperdual.hpp"
#include "moutard/moutard.hpp"
#include "moutard/parse.hpp"
#include "moutard/sampling.hpp"
#include "moutard/schrodinger.hpp"
#include "moutard/simplify.hpp"
#include "testutil.hpp"

using namespace moutard;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

// Worst relative difference between two expressions at n random points of
// the box, rejecting points where `excluded` is inside the margin.
double worst_rel_excluding(const Expr& a, const Expr& b,
                           const ParameterSet& params, const Expr& excluded,
                           double margin, int n, unsigned seed) {
  std::mt19937 gen(seed);
  double worst = 0.0;
  int used = 0, attempts = 0;
  while (used < n && attempts < 100 * n) {
    ++attempts;
    double r = sample_in(gen, 0.1, 5.0);
    double z = sample_in(gen, -5.0, 5.0);
    if (std::fabs(evaluate(excluded, r, z, params)) < margin) continue;
    double va = evaluate(a, r, z, params);
    double vb = evaluate(b, r, z, params);
    worst = std::max(worst, testutil::rel_diff(va, vb));
    ++used;
  }
  if (used < n) return 1.0;  // could not sample: treat as failure
  return worst;
}

// ---------------------------------------------------------------------- 1

Outcome criterion1() {
  Outcome out;
  Potential u_tilde =
      transform_potential(Potential{parse("0"), {}, 1e-8},
                          SeedSolution{parse("r^2 - 2*z^2"), {}, 1e-8}, {});
  Expr expected = parse("(4*z^4 + 13*r^4 + 20*r^2*z^2)/((r^2-2*z^2)^2*r^2)");
  double worst = worst_rel_excluding(u_tilde.expr, expected, {},
                                     parse("r^2 - 2*z^2"), 0.05, 100, 101u);
  double spot = evaluate(u_tilde.expr, 1.0, 1.0, {});
  out.passed = worst <= 1e-10 && std::fabs(spot - 37.0) <= 1e-10;
  out.detail = "worst rel " + format_double(worst) + " at 100 points, value " +
               format_double(spot) + " at (1,1)";
  return out;
}

// ---------------------------------------------------------------------- 2

Outcome criterion2() {
  Outcome out;
  ParameterSet params{{"C1", 1.0}};
  Expr u1 = transformed_potential_expr(parse("0"), parse("r^2 - 2*z^2"));
  Expr u2 = transformed_potential_expr(
      u1, parse("(4*r^2*z^2 + r^4 + C1)/(r*(r^2-2*z^2))"));
  Expr expected = parse(
      "(-8*r^2*((r^2-5*z^2)^2 - 33*z^4) - 8*C1*(5*r^2+2*z^2))"
      "/(4*r^2*z^2+r^4+C1)^2");
  double worst = worst_rel_excluding(u2, expected, params,
                                     parse("r^2 - 2*z^2"), 0.05, 100, 102u);
  ScanReport scan = scan_expression(expected,
                                    GridSpec{0.05, 5.0, -5.0, 5.0, 200, 200},
                                    params);
  double spot = evaluate(u2, 1.0, 0.0, params);
  out.passed = worst <= 1e-9 && scan.all_finite &&
               std::fabs(spot - (-12.0)) <= 1e-9;
  out.detail = "worst rel " + format_double(worst) +
               ", 200x200 scan finite=" + (scan.all_finite ? "yes" : "no") +
               ", value " + format_double(spot) + " at (1,0)";
  return out;
}

// ---------------------------------------------------------------------- 3

Outcome criterion3() {
  Outcome out;
  ParameterSet params{{"k", 1.0}, {"C2", 5.0}};
  Expr u1 = transformed_potential_expr(parse("-k^2"), parse("sin(k*z)"));
  Expr expected1 = parse("-k^2 + 1/r^2 + 2*k^2/sin(k*z)^2");
  Expr u2 =
      transformed_potential_expr(expected1, parse("(r^2+C2)/(r*sin(k*z))"));
  Expr expected2 = parse("-k^2 + 4/(r^2+C2) - 8*C2/(r^2+C2)^2");
  GridSpec box{0.1, 5.0, -5.0, 5.0, 2, 2};
  double worst1 =
      compare_at_random_points(u1, expected1, params, box, 100).worst_rel;
  double worst2 =
      compare_at_random_points(u2, expected2, params, box, 100).worst_rel;
  ScanReport scan = scan_expression(
      expected2, GridSpec{0.05, 10.0, -1.0, 1.0, 200, 5}, params);
  double spot = evaluate(u2, 1.0, 0.37, params);
  double expected_spot = -13.0 / 9.0;
  out.passed = worst1 <= 1e-9 && worst2 <= 1e-9 && scan.all_finite &&
               scan.max_value < 0.0 &&
               std::fabs(spot - expected_spot) <= 1e-9;
  out.detail = "worst rel " + format_double(std::max(worst1, worst2)) +
               ", scan max " + format_double(scan.max_value) + ", value at r=1 " +
               format_double(spot) + " vs -13/9";
  return out;
}

// ---------------------------------------------------------------------- 4

Outcome criterion4() {
  Outcome out;
  ParameterSet params{{"k", 2.0}, {"z0", 3.0}, {"C3", 1.0}};
  Expr u1 = transformed_potential_expr(
      parse("-k^2"), parse("sin(k*sqrt(r^2+(z+z0)^2))/sqrt(r^2+(z+z0)^2)"));
  Expr expected1 = parse(
      "-k^2 + 1/r^2 + 2*k^2/sin(k*sqrt(r^2+(z+z0)^2))^2"
      " - 2*k*cot(k*sqrt(r^2+(z+z0)^2))/sqrt(r^2+(z+z0)^2)");
  Expr u2 = transformed_potential_expr(
      expected1,
      parse("(z+z0+C3*sqrt(r^2+(z+z0)^2))/(sin(k*sqrt(r^2+(z+z0)^2))*r)"));
  Expr expected2 = parse(
      "-k^2 + 2/(z+z0+C3*sqrt(r^2+(z+z0)^2))^2"
      " + 2*C3*(z+z0)/(sqrt(r^2+(z+z0)^2)*(z+z0+C3*sqrt(r^2+(z+z0)^2))^2)");
  GridSpec box{0.1, 5.0, -5.0, 5.0, 2, 2};
  double worst1 =
      compare_at_random_points(u1, expected1, params, box, 100).worst_rel;
  double worst2 =
      compare_at_random_points(u2, expected2, params, box, 100).worst_rel;
  ScanReport scan = scan_expression(
      expected2, GridSpec{0.05, 5.0, 0.0, 10.0, 100, 100}, params);
  out.passed = worst1 <= 1e-9 && worst2 <= 1e-9 && scan.all_finite &&
               scan.max_value < 0.0;
  out.detail = "worst rel " + format_double(std::max(worst1, worst2)) +
               ", scan max " + format_double(scan.max_value) +
               " over z in [0,10]";
  return out;
}

// ---------------------------------------------------------------------- 5

Outcome criterion5() {
  Outcome out;
  ParameterSet params{{"C1", 0.0}};
  std::vector<SeedSolution> seeds{
      SeedSolution{parse("r^2 - 2*z^2"), {}, 1e-8},
      SeedSolution{parse("(4*r^2*z^2 + r^4 + C1)/(r*(r^2-2*z^2))"), {}, 1e-8}};
  std::vector<CarriedSpec> carried{{"point-source", parse("1/sqrt(r^2+z^2)")}};
  ChainOptions options;
  options.carried_grid = GridSpec{0.8, 2.0, 0.15, 0.45, 12, 12};
  options.transport.quad_tol = 1e-9;
  ChainResult result = chain(Potential{parse("0"), {}, 1e-8}, seeds, carried,
                             params, options);
  const CarriedState& state = result.carried.at(0);
  GridSpec fit_box{0.8, 2.0, 0.15, 0.45, 20, 20};

  GaugeFitResult fit1 = gauge_fit_check(
      *state.stage_fields.at(1), parse("r*z/((r^2-2*z^2)*sqrt(r^2+z^2))"),
      parse("1/(r*(r^2-2*z^2))"), params, fit_box, 50);
  GaugeFitResult fit2 = gauge_fit_check(
      *state.stage_fields.at(2),
      parse("(3*r^4 - C1)/(sqrt(r^2+z^2)*(4*r^2*z^2+r^4+C1))"),
      parse("(r^2-2*z^2)/(4*r^2*z^2+r^4+C1)"), params, fit_box, 50);
  double spot = evaluate(
      parse("(3*r^4 - C1)/(sqrt(r^2+z^2)*(4*r^2*z^2+r^4+C1))"), 1.0, 1.0,
      params);
  out.passed = fit1.max_rel_deviation <= 1e-6 &&
               fit2.max_rel_deviation <= 1e-5 &&
               std::fabs(spot - 0.4242641) <= 1e-6;
  out.detail = "first fit " + format_double(fit1.max_rel_deviation) +
               " at 50 held-out, second fit " +
               format_double(fit2.max_rel_deviation) + ", spot " +
               format_double(spot) + " at (1,1)";
  return out;
}

// ---------------------------------------------------------------------- 6

Outcome criterion6() {
  Outcome out;
  int pairs = 0;
  double worst = 0.0;
  std::string worst_name;
  auto check_pair = [&](const std::string& label, const Potential& u,
                        const SeedSolution& y, const ParameterSet& params) {
    ResidualReport report = residual_report(u, y, standard_grid(), params);
    ++pairs;
    if (report.max_rel_residual > worst) {
      worst = report.max_rel_residual;
      worst_name = label;
    }
  };
  for (const std::string& name : list_entries()) {
    const CatalogEntry& entry = get_entry(name);
    const ParameterSet& params = entry.params_default;
    Potential u{parse(entry.u_text), {}, 1e-8};
    SeedSolution y_h{parse(entry.y_h_text), {}, 1e-8};
    Potential expected{parse(entry.expected_potential_text), {}, 1e-8};
    check_pair(name + ":seed", u, y_h, params);
    if (entry.expected_solution_text)
      check_pair(name + ":expected",
                 expected,
                 SeedSolution{parse(*entry.expected_solution_text), {}, 1e-8},
                 params);
    check_pair(name + ":partner", expected, trivial_partner(y_h), params);
    if (entry.y_text)
      check_pair(name + ":carried-input", u,
                 SeedSolution{parse(*entry.y_text), {}, 1e-8}, params);
    if (entry.chain_fixture) {
      // Each chained stage's closed-form carried solution, under the
      // potential produced by that stage.
      Expr u_stage = parse(entry.u_text);
      for (std::size_t i = 0; i < entry.chain_fixture->seed_texts.size();
           ++i) {
        u_stage = transformed_potential_expr(
            u_stage, parse(entry.chain_fixture->seed_texts[i]));
        check_pair(
            name + ":stage" + std::to_string(i + 1) + "-carried",
            Potential{u_stage, {}, 1e-8},
            SeedSolution{parse(entry.chain_fixture->expected_carried_texts[i]),
                         {}, 1e-8},
            params);
      }
    }
  }
  out.passed = worst < 1e-7;
  out.detail = std::to_string(pairs) + " pairs, worst rel residual " +
               format_double(worst) + " (" + worst_name + ")";
  return out;
}

// ---------------------------------------------------------------------- 7

Outcome criterion7() {
  Outcome out;
  GridSpec box{0.1, 5.0, -5.0, 5.0, 2, 2};
  double worst_closed = 0.0, worst_path = 0.0, worst_inv = 0.0;
  double worst_scale = 0.0, worst_shift = 0.0, worst_routes = 0.0;
  std::string note;

  for (const std::string& name : list_entries()) {
    const CatalogEntry& entry = get_entry(name);
    const ParameterSet& params = entry.params_default;
    Expr u = parse(entry.u_text);
    Expr y_h = parse(entry.y_h_text);
    SeedSolution y_h_seed{y_h, {}, 1e-8};
    Expr forward = transformed_potential_expr(u, y_h);

    // Involution: transforming back with the trivial partner restores u.
    Expr back =
        transformed_potential_expr(forward, trivial_partner(y_h_seed).expr);
    worst_inv = std::max(
        worst_inv,
        compare_at_random_points(back, u, params, box, 50).worst_rel);

    // Seed-scale invariance.
    for (double c : {-3.0, 0.5, 7.0}) {
      Expr scaled = transformed_potential_expr(
          u, simplify(number(Rational(std::int64_t(c * 2), 2)) * y_h));
      worst_scale = std::max(
          worst_scale,
          compare_at_random_points(scaled, forward, params, box, 50)
              .worst_rel);
    }

    // z-shift equivariance: shift inputs, transform, compare with the
    // shifted output.
    Expr shift = parse("z - 7/10");
    Expr lhs = transformed_potential_expr(substitute_var(u, 'z', shift),
                                          substitute_var(y_h, 'z', shift));
    Expr rhs = substitute_var(forward, 'z', shift);
    worst_shift = std::max(
        worst_shift,
        compare_at_random_points(lhs, rhs, params, box, 50).worst_rel);

    // Route agreement where r y_h > 0.
    Expr via_h =
        transform_potential_from_h(Potential{u, {}, 1e-8},
                                   h_from_seed(y_h_seed))
            .expr;
    Expr s = simplify(parse("r") * y_h);
    std::mt19937 gen(707u);
    int used = 0, attempts = 0;
    while (used < 50 && attempts < 5000) {
      ++attempts;
      double r = sample_in(gen, 0.1, 5.0);
      double z = sample_in(gen, -5.0, 5.0);
      try {
        Magnitude sm = evaluate_with_magnitude(s, r, z, params);
        if (sm.value < 3e-3 * std::max(1.0, sm.magnitude)) continue;
        double v1 = evaluate(forward, r, z, params);
        double v2 = evaluate(via_h, r, z, params);
        worst_routes = std::max(worst_routes, testutil::rel_diff(v1, v2));
        ++used;
      } catch (const EvalError&) {
        continue;
      }
    }
    if (used < 50) {
      out.detail = name + ": could not sample 50 route-agreement points";
      return out;
    }

    if (!entry.y_text) continue;
    Expr y = parse(*entry.y_text);

    // Closedness of the one-form at 50 regular random points.
    OneForm form =
        make_oneform(SeedSolution{y, {}, 1e-8}, y_h_seed);
    Expr curl =
        simplify(differentiate(form.a, 'z') - differentiate(form.b, 'r'));
    std::mt19937 cgen(708u);
    int cused = 0, cattempts = 0;
    while (cused < 50 && cattempts < 5000) {
      ++cattempts;
      double r = sample_in(cgen, 0.1, 5.0);
      double z = sample_in(cgen, -5.0, 5.0);
      try {
        double cv = std::fabs(evaluate(curl, r, z, params));
        double scale = std::max({std::fabs(evaluate(form.a, r, z, params)),
                                 std::fabs(evaluate(form.b, r, z, params)),
                                 1.0});
        worst_closed = std::max(worst_closed, cv / scale);
        ++cused;
      } catch (const EvalError&) {
        continue;
      }
    }

    // Path independence of P: r-first vs z-first manual corner routes from
    // the entry's basepoint to 50 targets in its fit box.
    auto y_field = std::make_shared<ClosedFormField>(y, params);
    auto yh_field = std::make_shared<ClosedFormField>(y_h, params);
    TransformedSolutionField field(y_field, yh_field, entry.base_r,
                                   entry.base_z);
    auto A = [&](double r, double z) { return field.one_form_at(r, z).a; };
    auto B = [&](double r, double z) { return field.one_form_at(r, z).b; };
    std::mt19937 pgen(709u);
    for (int i = 0; i < 50; ++i) {
      double r = sample_in(pgen, entry.fit_box.r_min, entry.fit_box.r_max);
      double z = sample_in(pgen, entry.fit_box.z_min, entry.fit_box.z_max);
      PathPlan r_first{{PathSegment{true, entry.base_z, entry.base_r, r},
                        PathSegment{false, r, entry.base_z, z}}};
      PathPlan z_first{{PathSegment{false, entry.base_r, entry.base_z, z},
                        PathSegment{true, z, entry.base_r, r}}};
      double pa = line_integral(A, B, r_first, 1e-10).value;
      double pb = line_integral(A, B, z_first, 1e-10).value;
      worst_path = std::max(worst_path, testutil::rel_diff(pa, pb));
    }
  }

  out.passed = worst_closed < 1e-8 && worst_path < 1e-8 &&
               worst_inv < 1e-9 && worst_scale < 1e-9 &&
               worst_shift < 1e-9 && worst_routes < 1e-9;
  out.detail = "closedness " + format_double(worst_closed) + ", path " +
               format_double(worst_path) + ", involution " +
               format_double(worst_inv) + ", scale " +
               format_double(worst_scale) + ", shift " +
               format_double(worst_shift) + ", routes " +
               format_double(worst_routes);
  return out;
}

// ---------------------------------------------------------------------- 8

Outcome criterion8() {
  Outcome out;
  testutil::ExprGen gen(808u);
  ParameterSet params{{"a", 1.3}};
  double worst_hd = 0.0, worst_fd = 0.0;
  int samples = 0;
  while (samples < 500) {
    Expr e = gen.sample();
    Expr er = differentiate(e, 'r');
    Expr ez = differentiate(e, 'z');
    Expr err_ = differentiate(er, 'r');
    Expr erz = differentiate(er, 'z');
    Expr ezz = differentiate(ez, 'z');
    for (int j = 0; j < 5 && samples < 500; ++j) {
      double r = sample_in(gen.rng(), 0.3, 2.5);
      double z = sample_in(gen.rng(), -2.0, 2.0);
      HyperDual h = evaluate_hyperdual(e, r, z, params);
      worst_hd = std::max(
          {worst_hd, testutil::rel_diff(evaluate(er, r, z, params), h.dr),
           testutil::rel_diff(evaluate(ez, r, z, params), h.dz),
           testutil::rel_diff(evaluate(err_, r, z, params), h.drr),
           testutil::rel_diff(evaluate(erz, r, z, params), h.drz),
           testutil::rel_diff(evaluate(ezz, r, z, params), h.dzz)});
      worst_fd = std::max(
          {worst_fd,
           testutil::rel_diff(evaluate(er, r, z, params),
                              testutil::fd_partial_r(e, r, z, params)),
           testutil::rel_diff(evaluate(ez, r, z, params),
                              testutil::fd_partial_z(e, r, z, params))});
      ++samples;
    }
  }
  out.passed = worst_hd <= 1e-12 && worst_fd <= 1e-6;
  out.detail = "500 samples: hyper-dual worst " + format_double(worst_hd) +
               ", finite-difference worst " + format_double(worst_fd);
  return out;
}

// ---------------------------------------------------------------------- 9

Outcome criterion9() {
  Outcome out;
  testutil::CliResult bad_seed = testutil::run_cli(
      {"transform", "--potential", "0", "--seed", "r"});
  testutil::CliResult separated = testutil::run_cli(
      {"solve", "--potential",
       "(4*z^4 + 13*r^4 + 20*r^2*z^2)/((r^2-2*z^2)^2*r^2)", "--seed",
       "(4*r^2*z^2 + r^4 + C1)/(r*(r^2-2*z^2))", "--solution",
       "r*z/((r^2-2*z^2)*sqrt(r^2+z^2))", "--param", "C1=1", "--base",
       "1,0.1", "--at", "1,1"});
  bool seed_ok = bad_seed.exit_code == 1 &&
                 bad_seed.err.find("not a solution") != std::string::npos;
  bool path_ok = separated.exit_code == 3;
  out.passed = seed_ok && path_ok;
  out.detail = "non-solution seed exit " +
               std::to_string(bad_seed.exit_code) +
               ", cone-separated target exit " +
               std::to_string(separated.exit_code);
  return out;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* label;
    Outcome (*fn)();
    double budget_seconds;  // 0 = no pinned runtime
  };
  const Entry entries[] = {
      {1, "first transformed potential matches its closed form", criterion1,
       1.0},
      {2, "two-stage potential matches and is bounded (C1 > 0)", criterion2,
       5.0},
      {3, "cylindrical pair matches; output strictly negative", criterion3,
       0.0},
      {4, "shifted spherical pair matches; negative for z >= 0", criterion4,
       0.0},
      {5, "transported solutions match printed families", criterion5, 30.0},
      {6, "all output pairs pass the residual sweep", criterion6, 0.0},
      {7, "structural identities hold at random points", criterion7, 0.0},
      {8, "derivative oracles agree", criterion8, 0.0},
      {9, "negative controls exit with the contracted codes", criterion9,
       0.0},
  };

  int failures = 0;
  for (const Entry& entry : entries) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& e) {
      outcome.passed = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    double elapsed = seconds_since(start);
    bool in_budget =
        entry.budget_seconds == 0.0 || elapsed <= entry.budget_seconds;
    bool passed = outcome.passed && in_budget;
    if (!passed) ++failures;
    std::printf("criterion %d: %s (%.2f s) - %s: %s%s\n", entry.id,
                passed ? "PASS" : "FAIL", elapsed, entry.label,
                outcome.detail.c_str(),
                in_budget ? "" : " [over runtime budget]");
  }
  std::printf("acceptance: %d/9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
