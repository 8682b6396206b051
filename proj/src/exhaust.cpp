#include "gvp/exhaust.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gvp {

DiscreteVectorMeasure renormalize_restriction(
    const Condenser& c, const DiscreteVectorMeasure& mu,
    const std::vector<std::vector<std::size_t>>& subset) {
  if (mu.weights.size() != c.plates.size() || subset.size() != c.plates.size())
    fail(Errc::condenser_mismatch, "restriction needs one subset per plate");

  DiscreteVectorMeasure out = zero_measure(c);
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    const Plate& p = c.plates[i];
    double m = 0.0;
    for (std::size_t local : subset[i]) {
      if (local >= p.nodes.size())
        fail(Errc::condenser_mismatch, "subset index out of range");
      out.weights[i][local] = mu.weights[i][local];
      m += p.g[local] * mu.weights[i][local];
    }
    if (!(m > 0.0))
      fail(Errc::zero_restricted_mass,
           "restricted measure has zero g-mass on plate " + std::to_string(i));
    const double s = p.mass / m;
    for (std::size_t local : subset[i]) out.weights[i][local] *= s;
  }
  return out;
}

namespace {

FieldValues restrict_field(const FieldValues& f,
                           const std::vector<std::vector<std::size_t>>& subset) {
  FieldValues out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::vector<double> vals;
    vals.reserve(subset[i].size());
    for (std::size_t local : subset[i]) vals.push_back(f[i][local]);
    out.push_back(std::move(vals));
  }
  return out;
}

// Zero-extension of a restricted measure back onto the parent condenser.
DiscreteVectorMeasure extend(const Condenser& parent,
                             const std::vector<std::vector<std::size_t>>& subset,
                             const DiscreteVectorMeasure& sub_mu) {
  DiscreteVectorMeasure out = zero_measure(parent);
  for (std::size_t i = 0; i < subset.size(); ++i)
    for (std::size_t k = 0; k < subset[i].size(); ++k)
      out.weights[i][subset[i][k]] = sub_mu.weights[i][k];
  return out;
}

}  // namespace

ExhaustionReport run_exhaustion(const System& sys, const FieldValues& f,
                                const ExhaustionSchedule& schedule,
                                const SolverConfig& cfg, double tol,
                                double monotone_tol) {
  ExhaustionReport rep;
  rep.full = solve(sys, f, cfg);
  const double full_pairing = field_pairing(f, rep.full.lambda);

  for (std::size_t m = 0; m < schedule.steps.size(); ++m) {
    const auto& subset = schedule.steps[m];
    for (std::size_t i = 0; i < subset.size(); ++i) {
      bool any_finite = false;
      for (std::size_t local : subset[i])
        if (f[i][local] != kInf) any_finite = true;
      if (subset[i].empty() || !any_finite)
        fail(Errc::step_infeasible,
             "exhaustion step " + std::to_string(m) + " infeasible on plate " +
                 std::to_string(i));
    }

    const System sub = sys.restricted(subset);
    const FieldValues sub_f = restrict_field(f, subset);
    const EquilibriumReport sub_rep = solve(sub, sub_f, cfg);

    ExhaustionStepRow row;
    row.step = static_cast<int>(m);
    for (const auto& s : subset) row.subset_sizes.push_back(s.size());
    row.value = sub_rep.value;
    row.gap = sub_rep.gap;
    row.constants = sub_rep.constants;
    const DiscreteVectorMeasure lifted =
        extend(sys.condenser(), subset, sub_rep.lambda);
    row.field_pairing = field_pairing(f, lifted);
    row.distance_to_final = semimetric_distance(sys, lifted, rep.full.lambda);
    rep.steps.push_back(std::move(row));
  }

  for (std::size_t m = 0; m + 1 < rep.steps.size(); ++m) {
    const double scale = std::max(1.0, std::fabs(rep.steps[m].value));
    if (rep.steps[m + 1].value > rep.steps[m].value + monotone_tol * scale)
      rep.monotone_ok = false;
  }

  if (!rep.steps.empty()) {
    const ExhaustionStepRow& last = rep.steps.back();
    rep.final_distance = last.distance_to_final;
    rep.final_value_diff = std::fabs(last.value - rep.full.value);
    rep.final_pairing_diff = std::fabs(last.field_pairing - full_pairing);
    for (std::size_t i = 0; i < last.constants.size(); ++i)
      rep.final_constants_diff =
          std::max(rep.final_constants_diff,
                   std::fabs(last.constants[i] - rep.full.constants[i]));
    const double vscale = std::max(1.0, std::fabs(rep.full.value));
    rep.converged = rep.final_distance <= tol &&
                    rep.final_value_diff <= tol * vscale &&
                    rep.final_pairing_diff <= tol &&
                    rep.final_constants_diff <= tol;
  }
  return rep;
}

}  // namespace gvp
