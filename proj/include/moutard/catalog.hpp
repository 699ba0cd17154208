#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moutard/grid.hpp"
#include "moutard/moutard.hpp"
#include "moutard/schrodinger.hpp"

namespace moutard {

// A parameter-space condition attached to an entry, e.g. "C1 > 0", together
// with a short note on what it guarantees.
struct SideCondition {
  std::string predicate;  // "<lhs> < <rhs>" or "<lhs> > <rhs>", params only
  std::string note;
};

enum class ScanAssertion {
  AllFiniteBelow,  // every point evaluates; max |value| <= bound
  AllNegative,     // every point evaluates; max value < 0
};

struct ScanCheck {
  std::string label;
  std::string expr_text;  // empty means the entry's expected potential
  GridSpec region{};
  ScanAssertion assertion = ScanAssertion::AllFiniteBelow;
  double bound = 0.0;
};

// A two-stage pipeline carrying an extra solution through both
// transformations; used by the entry that reproduces the numerically
// transported solution family.
struct ChainFixture {
  std::vector<std::string> seed_texts;  // y_h per stage
  std::string carried_text;             // solution of the initial potential
  std::vector<std::string> expected_carried_texts;  // closed form per stage
  GridSpec carried_grid{};  // residual re-verification grid for the transports
};

// One worked transformation, stored as expression text so the expected
// closed forms act as oracles independent of the transformation code.
struct CatalogEntry {
  std::string name;
  std::string summary;
  std::string u_text;    // input potential
  std::string y_h_text;  // transformation seed
  std::optional<std::string> y_text;  // transported solution, when the entry
                                      // exercises the line-integral route
  std::string expected_potential_text;
  std::optional<std::string> expected_solution_text;
  bool expected_is_trivial_partner = false;
  ParameterSet params_default;
  GridSpec region{};      // residual verification grid
  GridSpec sample_box{};  // random-point equality sampling box
  GridSpec fit_box{};     // gauge-fit box (transport comparisons)
  double base_r = 1.0, base_z = 0.0;  // transport basepoint
  std::vector<SideCondition> side_conditions;
  std::vector<ScanCheck> scans;
  std::optional<ChainFixture> chain_fixture;
};

struct Tolerances {
  double residual = 1e-7;            // residual_report max_rel
  double equality = 1e-9;            // potential vs expected, random points
  double solution_equality = 1e-12;  // trivial partner vs expected closed form
  double closedness = 1e-8;
  double involution = 1e-9;
  double gauge_fit_first = 1e-6;   // single transport vs printed family
  double gauge_fit_second = 1e-5;  // nested double transport
  double quad_tol = 1e-9;
  int n_random = 100;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct EntryReport {
  std::string entry;
  bool passed = false;
  std::vector<CheckResult> checks;
};

std::vector<std::string> list_entries();

// Throws std::out_of_range for unknown names.
const CatalogEntry& get_entry(const std::string& name);

// Runs every check the entry declares: seed and pair residuals, transformed
// potential vs the stored closed form at random regular points, trivial
// partner checks, closedness, involution, side conditions, scans, gauge-fit
// transport comparisons, and the two-stage carried pipeline where present.
EntryReport verify_entry(const std::string& name, const Tolerances& tol = {});

// Evaluates a side-condition predicate ("lhs < rhs" or "lhs > rhs", both
// sides parameter-only expressions) under the given parameters.
bool check_side_condition(const std::string& predicate,
                          const ParameterSet& params);

// Random-point equality of two expressions; samples are rejected when any
// singularity factor of either side is within `margin` of zero (relative to
// its magnitude), which keeps cancellation noise out of the comparison.
struct PointEquality {
  double worst_rel = 0.0;
  int n_used = 0;
  double worst_r = 0.0, worst_z = 0.0;
};

PointEquality compare_at_random_points(const Expr& a, const Expr& b,
                                       const ParameterSet& params,
                                       const GridSpec& box, int n_points,
                                       double margin = 3e-3,
                                       unsigned seed = 0x706f74u);

}  // namespace moutard
