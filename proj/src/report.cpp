#include "gvp/report.hpp"

namespace gvp {

using nlohmann::ordered_json;

namespace {

ordered_json num(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

ordered_json vec(const std::vector<double>& v) {
  ordered_json arr = ordered_json::array();
  for (double x : v) arr.push_back(num(x));
  return arr;
}

ordered_json plate_check(const PlateCheck& c) {
  ordered_json j;
  j["ok"] = c.ok;
  j["worst_residual"] = num(c.worst_residual);
  j["worst_node"] = c.worst_node;
  return j;
}

}  // namespace

ordered_json to_json(const EquilibriumReport& rep) {
  ordered_json j;
  ordered_json lambda = ordered_json::array();
  for (const auto& row : rep.lambda.weights) lambda.push_back(vec(row));
  j["lambda"] = std::move(lambda);
  j["value"] = num(rep.value);
  j["constants"] = vec(rep.constants);
  j["gap"] = num(rep.gap);
  j["iters"] = rep.iters;
  j["converged"] = rep.converged;
  j["feasibility"] = vec(rep.feasibility);
  return j;
}

ordered_json to_json(const CertificateResult& cert) {
  ordered_json j;
  j["ok"] = cert.all_ok();
  j["tol"] = cert.tol;
  ordered_json lower = ordered_json::array();
  for (const auto& c : cert.lower) lower.push_back(plate_check(c));
  j["lower"] = std::move(lower);
  ordered_json upper = ordered_json::array();
  for (const auto& c : cert.support_upper) upper.push_back(plate_check(c));
  j["support_upper"] = std::move(upper);
  ordered_json comp = ordered_json::array();
  for (const auto& c : cert.complementarity) comp.push_back(plate_check(c));
  j["complementarity"] = std::move(comp);
  ordered_json value_identity;
  value_identity["residual"] = num(cert.value_identity_residual);
  value_identity["ok"] = cert.value_identity_ok;
  j["value_identity"] = std::move(value_identity);
  ordered_json constants = ordered_json::array();
  for (const auto& c : cert.constants) {
    ordered_json e;
    e["inner"] = num(c.inner);
    e["inf"] = num(c.inf_form);
    e["discrepancy"] = num(c.discrepancy);
    constants.push_back(std::move(e));
  }
  j["constants"] = std::move(constants);
  if (!cert.eta.empty()) j["eta"] = vec(cert.eta);
  ordered_json cross;
  cross["sup_cross"] = num(cert.cross_sup.sup_cross);
  cross["finite"] = cert.cross_sup.finite;
  cross["has_negative_plates"] = cert.cross_sup.has_negative;
  j["cross_sup"] = std::move(cross);
  return j;
}

ordered_json to_json(const EtaCertificate& eta) {
  ordered_json j;
  j["side_a_ok"] = eta.side_a_ok;
  j["side_b_ok"] = eta.side_b_ok;
  j["certified"] = eta.certified;
  j["eta_matches_constants"] = eta.eta_matches_constants;
  j["inner_products"] = vec(eta.inner_products);
  return j;
}

ordered_json to_json(const ExhaustionReport& rep) {
  ordered_json j;
  ordered_json steps = ordered_json::array();
  for (const auto& s : rep.steps) {
    ordered_json e;
    e["step"] = s.step;
    ordered_json sizes = ordered_json::array();
    for (std::size_t n : s.subset_sizes) sizes.push_back(n);
    e["subset_sizes"] = std::move(sizes);
    e["value"] = num(s.value);
    e["gap"] = num(s.gap);
    e["constants"] = vec(s.constants);
    e["field_pairing"] = num(s.field_pairing);
    e["distance_to_final"] = num(s.distance_to_final);
    steps.push_back(std::move(e));
  }
  j["steps"] = std::move(steps);
  j["monotone_ok"] = rep.monotone_ok;
  j["converged"] = rep.converged;
  j["final_distance"] = num(rep.final_distance);
  j["final_value_diff"] = num(rep.final_value_diff);
  j["final_constants_diff"] = num(rep.final_constants_diff);
  j["final_pairing_diff"] = num(rep.final_pairing_diff);
  j["full"] = to_json(rep.full);
  return j;
}

ordered_json to_json(const CapacityResult& cap) {
  ordered_json j;
  j["capacity"] = num(cap.capacity);
  j["robin_constant"] = num(cap.robin_constant);
  j["theta"] = vec(cap.theta);
  j["min_potential"] = num(cap.min_potential);
  j["mass_norm_residual"] = num(cap.mass_norm_residual);
  j["gap"] = num(cap.gap);
  j["invariants_ok"] = cap.invariants_ok;
  return j;
}

ordered_json to_json(const FeasibilityReport& f) {
  ordered_json j;
  j["feasible"] = f.feasible;
  ordered_json inf = ordered_json::array();
  for (int i : f.infinite_plates) inf.push_back(i);
  j["infinite_plates"] = std::move(inf);
  j["min_abs_field"] = vec(f.min_abs_field);
  ordered_json mass;
  mass["sum"] = num(f.mass_summability.sum);
  mass["per_plate"] = vec(f.mass_summability.per_plate);
  mass["degenerate_scale"] = f.mass_summability.degenerate_scale;
  j["mass_summability"] = std::move(mass);
  return j;
}

ordered_json to_json(const ValidationResult& v) {
  ordered_json j;
  j["ok"] = v.ok;
  ordered_json list = ordered_json::array();
  for (const auto& rec : v.violations) {
    ordered_json e;
    e["kind"] = violation_name(rec.kind);
    e["plate"] = rec.plate;
    e["node"] = rec.node;
    e["detail"] = rec.detail;
    list.push_back(std::move(e));
  }
  j["violations"] = std::move(list);
  return j;
}

ordered_json to_json(const UniquenessReport& u) {
  ordered_json j;
  j["pair_count"] = u.pair_count;
  j["all_ok"] = u.all_ok;
  j["max_distance"] = num(u.max_distance);
  j["max_pairing_diff"] = num(u.max_pairing_diff);
  j["max_potential_diff"] = num(u.max_potential_diff);
  j["max_constant_diff"] = num(u.max_constant_diff);
  j["max_r_image_diff"] = num(u.max_r_image_diff);
  j["strict_checked"] = u.strict_checked;
  return j;
}

}  // namespace gvp
