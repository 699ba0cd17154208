#include "moutard/json_io.hpp"

namespace moutard {

void to_json(json& j, const ResidualReport& r) {
  j = json{{"grid", r.grid.to_text()},
           {"n_evaluated", r.n_evaluated},
           {"n_skipped", r.n_skipped_singular},
           {"max_abs", r.max_abs_residual},
           {"max_rel", r.max_rel_residual},
           {"worst_point", {r.worst_r, r.worst_z}}};
}

void to_json(json& j, const ScanReport& r) {
  j = json{{"grid", r.grid.to_text()},
           {"n_evaluated", r.n_evaluated},
           {"n_skipped", r.n_skipped_singular},
           {"n_domain_error", r.n_domain_error},
           {"min", r.min_value},
           {"max", r.max_value},
           {"argmin", {r.argmin_r, r.argmin_z}},
           {"argmax", {r.argmax_r, r.argmax_z}},
           {"sign_changes", r.sign_changes},
           {"all_finite", r.all_finite}};
}

void to_json(json& j, const TransformStep& s) {
  j = json{{"u", to_text(s.u.expr)},
           {"y_h", to_text(s.y_h.expr)},
           {"u_tilde", to_text(s.u_tilde.expr)},
           {"params", s.params},
           {"verification", s.verified}};
}

void to_json(json& j, const CheckResult& c) {
  j = json{{"name", c.name},
           {"passed", c.passed},
           {"measured", c.measured},
           {"tolerance", c.tolerance}};
  if (!c.detail.empty()) j["detail"] = c.detail;
}

void to_json(json& j, const EntryReport& r) {
  j = json{{"entry", r.entry}, {"passed", r.passed}, {"checks", r.checks}};
}

void to_json(json& j, const CatalogEntry& e) {
  j = json{{"name", e.name},
           {"summary", e.summary},
           {"u", e.u_text},
           {"y_h", e.y_h_text},
           {"expected_potential", e.expected_potential_text},
           {"params", e.params_default},
           {"basepoint", {e.base_r, e.base_z}}};
  if (e.y_text) j["y"] = *e.y_text;
  if (e.expected_solution_text) {
    j["expected_solution"] = *e.expected_solution_text;
    j["expected_is_trivial_partner"] = e.expected_is_trivial_partner;
  }
  if (!e.side_conditions.empty()) {
    json sides = json::array();
    for (const SideCondition& s : e.side_conditions)
      sides.push_back(json{{"predicate", s.predicate}, {"note", s.note}});
    j["side_conditions"] = sides;
  }
}

}  // namespace moutard
