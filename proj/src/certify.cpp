#include "gvp/certify.hpp"

#include <algorithm>
#include <cmath>

namespace gvp {

bool CertificateResult::all_ok() const {
  for (const auto& c : lower)
    if (!c.ok) return false;
  for (const auto& c : support_upper)
    if (!c.ok) return false;
  for (const auto& c : complementarity)
    if (!c.ok) return false;
  return value_identity_ok;
}

namespace {

void require_feasible(const System& sys, const DiscreteVectorMeasure& mu) {
  require_compatible(sys, mu);
  const Condenser& c = sys.condenser();
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    const double m = g_mass(c, mu, i);
    if (std::fabs(m - c.plates[i].mass) > 1e-6 * c.plates[i].mass)
      fail(Errc::infeasible, "measure does not satisfy the plate mass constraints");
  }
}

// Certification scale per plate: max(1, |C^i|, max finite |a_i W^i(x)|).
double plate_scale(const Plate& p, const std::vector<double>& w_pot, double ci) {
  double s = std::max(1.0, std::fabs(ci));
  for (double wp : w_pot)
    if (std::isfinite(wp)) s = std::max(s, std::fabs(p.mass * wp));
  return s;
}

}  // namespace

CertificateResult certify_equilibrium(const System& sys, const FieldValues& f,
                                      const DiscreteVectorMeasure& lambda,
                                      double tol, double support_threshold) {
  require_feasible(sys, lambda);
  const Condenser& c = sys.condenser();
  const std::vector<double> pot = weighted_potentials(sys, lambda, f);

  CertificateResult out;
  out.tol = tol;
  out.cross_sup = check_cross_sup(c, sys.kernel());

  double sum_constants = 0.0;
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    const Plate& p = c.plates[i];
    const std::size_t off = sys.offset(i);

    std::vector<double> wpot(p.nodes.size());
    for (std::size_t n = 0; n < p.nodes.size(); ++n) wpot[n] = pot[off + n];

    ConstantRecord rec;
    for (std::size_t n = 0; n < p.nodes.size(); ++n) {
      const double w = lambda.weights[i][n];
      if (w != 0.0) rec.inner += w * wpot[n];
    }
    rec.inf_form = kInf;
    for (std::size_t n = 0; n < p.nodes.size(); ++n)
      rec.inf_form = std::min(rec.inf_form, p.mass * wpot[n] / p.g[n]);
    rec.discrepancy = rec.inner - rec.inf_form;
    sum_constants += rec.inner;

    const double scale = plate_scale(p, wpot, rec.inner);
    const double slack = tol * scale;

    PlateCheck lower, upper, comp;
    for (std::size_t n = 0; n < p.nodes.size(); ++n) {
      const double residual = p.mass * wpot[n] - rec.inner * p.g[n];
      if (lower.worst_node < 0 || residual < lower.worst_residual) {
        lower.worst_residual = residual;
        lower.worst_node = static_cast<int>(n);
      }
      const bool in_support =
          lambda.weights[i][n] > support_cutoff(sys, support_threshold, i, n);
      if (in_support) {
        if (upper.worst_node < 0 || residual > upper.worst_residual) {
          upper.worst_residual = residual;
          upper.worst_node = static_cast<int>(n);
        }
        if (comp.worst_node < 0 ||
            std::fabs(residual) > std::fabs(comp.worst_residual)) {
          comp.worst_residual = residual;
          comp.worst_node = static_cast<int>(n);
        }
      }
    }
    lower.ok = lower.worst_node < 0 || lower.worst_residual >= -slack;
    upper.ok = upper.worst_node < 0 || upper.worst_residual <= slack;
    comp.ok = comp.worst_node < 0 || std::fabs(comp.worst_residual) <= slack;

    out.lower.push_back(lower);
    out.support_upper.push_back(upper);
    out.complementarity.push_back(comp);
    out.constants.push_back(rec);
  }

  const double value = weighted_energy(sys, lambda, f);
  const double pairing = field_pairing(f, lambda);
  out.value_identity_residual = std::fabs(value - sum_constants - pairing);
  out.value_identity_ok =
      out.value_identity_residual <= tol * std::max(1.0, std::fabs(value));
  return out;
}

EtaCertificate check_eta_certificate(const System& sys, const FieldValues& f,
                                     const DiscreteVectorMeasure& mu,
                                     const std::vector<double>& eta,
                                     double value_bound, double tol,
                                     double support_threshold) {
  require_feasible(sys, mu);
  const Condenser& c = sys.condenser();
  if (eta.size() != c.plates.size())
    fail(Errc::condenser_mismatch, "eta needs one value per plate");
  const std::vector<double> pot = weighted_potentials(sys, mu, f);

  EtaCertificate out;
  bool pointwise_lower = true;   // (a): a_i W >= eta_i g everywhere
  bool pointwise_upper = true;   // (b): a_i W <= eta_i g on the support
  double sum_eta = 0.0;
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    const Plate& p = c.plates[i];
    const std::size_t off = sys.offset(i);
    sum_eta += eta[i];

    std::vector<double> wpot(p.nodes.size());
    for (std::size_t n = 0; n < p.nodes.size(); ++n) wpot[n] = pot[off + n];
    const double slack = tol * plate_scale(p, wpot, eta[i]);

    double inner = 0.0;
    for (std::size_t n = 0; n < p.nodes.size(); ++n) {
      const double w = mu.weights[i][n];
      if (w != 0.0) inner += w * wpot[n];
      const double residual = p.mass * wpot[n] - eta[i] * p.g[n];
      if (residual < -slack) pointwise_lower = false;
      if (w > support_cutoff(sys, support_threshold, i, n) && residual > slack)
        pointwise_upper = false;
    }
    out.inner_products.push_back(inner);
  }

  const double value = weighted_energy(sys, mu, f);
  const double pairing = field_pairing(f, mu);
  const double vscale = std::max(1.0, std::fabs(value));
  out.side_a_ok = pointwise_lower && value <= sum_eta + pairing + tol * vscale;
  out.side_b_ok = pointwise_upper && value_bound >= sum_eta + pairing - tol * vscale;
  out.certified = out.side_a_ok || out.side_b_ok;
  if (out.certified) {
    out.eta_matches_constants = true;
    for (std::size_t i = 0; i < eta.size(); ++i) {
      const double scale = std::max(1.0, std::fabs(out.inner_products[i]));
      if (std::fabs(eta[i] - out.inner_products[i]) > tol * scale)
        out.eta_matches_constants = false;
    }
  }
  return out;
}

UniquenessReport uniqueness_battery(const System& sys, const FieldValues& f,
                                    const std::vector<DiscreteVectorMeasure>& lambdas,
                                    double tol) {
  if (lambdas.size() < 2)
    fail(Errc::domain_error, "uniqueness battery needs at least two measures");
  UniquenessReport out;
  out.strict_checked = sys.psd().strict;

  std::vector<std::vector<double>> pots;
  std::vector<std::vector<double>> constants;
  std::vector<double> pairings;
  std::vector<ScalarSignedMeasure> images;
  for (const auto& m : lambdas) {
    pots.push_back(weighted_potentials(sys, m, f));
    pairings.push_back(field_pairing(f, m));
    std::vector<double> cs(sys.plate_count(), 0.0);
    for (std::size_t i = 0; i < sys.plate_count(); ++i) {
      const std::size_t off = sys.offset(i);
      for (std::size_t n = 0; n < sys.plate_size(i); ++n)
        if (m.weights[i][n] != 0.0) cs[i] += m.weights[i][n] * pots[pots.size() - 1][off + n];
    }
    constants.push_back(std::move(cs));
    images.push_back(r_map(sys.condenser(), m));
  }

  for (std::size_t a = 0; a < lambdas.size(); ++a) {
    for (std::size_t b = a + 1; b < lambdas.size(); ++b) {
      ++out.pair_count;
      out.max_distance =
          std::max(out.max_distance, semimetric_distance(sys, lambdas[a], lambdas[b]));
      out.max_pairing_diff =
          std::max(out.max_pairing_diff, std::fabs(pairings[a] - pairings[b]));
      for (std::size_t p = 0; p < sys.node_count(); ++p)
        out.max_potential_diff =
            std::max(out.max_potential_diff, std::fabs(pots[a][p] - pots[b][p]));
      for (std::size_t i = 0; i < sys.plate_count(); ++i)
        out.max_constant_diff = std::max(
            out.max_constant_diff, std::fabs(constants[a][i] - constants[b][i]));
      if (out.strict_checked) {
        const ScalarSignedMeasure diff = scalar_difference(images[a], images[b]);
        for (const auto& atom : diff.atoms)
          out.max_r_image_diff = std::max(out.max_r_image_diff, std::fabs(atom.weight));
      }
    }
  }
  out.all_ok = out.max_distance <= tol && out.max_pairing_diff <= tol &&
               out.max_potential_diff <= tol && out.max_constant_diff <= tol &&
               (!out.strict_checked || out.max_r_image_diff <= tol);
  return out;
}

CapacityResult scalar_equilibrium(const Kernel& k, const std::vector<Point>& nodes,
                                  double tol) {
  Condenser c;
  Plate p;
  p.id = 0;
  p.sign = +1;
  p.nodes = nodes;
  p.g.assign(nodes.size(), 1.0);
  p.mass = 1.0;
  c.plates.push_back(std::move(p));

  System sys(k, c);
  if (!sys.psd().strict)
    fail(Errc::degenerate_gram, "node set gram is not strictly positive definite");

  SolverConfig cfg;
  cfg.gap_tol_abs = 0.0;
  cfg.gap_tol_rel = std::min(tol, 1e-9);
  const FieldValues f = field_values(sys, ExternalField::zero(c));
  const EquilibriumReport rep = solve(sys, f, cfg);

  const double energy = rep.value;
  if (!(energy > 0.0))
    fail(Errc::degenerate_gram, "minimum energy is not positive");

  CapacityResult out;
  out.capacity = 1.0 / energy;
  out.robin_constant = energy;
  out.gap = rep.gap;
  out.theta = rep.lambda.weights[0];
  for (double& w : out.theta) w *= out.capacity;

  // Post-checks of the defining identities.
  DiscreteVectorMeasure omega = rep.lambda;
  double theta_mass = 0.0;
  for (double w : out.theta) theta_mass += w;
  const double theta_norm_sq =
      out.capacity * out.capacity * mutual_energy(sys, omega, omega);
  out.mass_norm_residual =
      std::max(std::fabs(theta_mass - out.capacity), std::fabs(theta_norm_sq - out.capacity)) /
      std::max(1e-300, out.capacity);

  out.min_potential = kInf;
  const std::vector<double> pot = weighted_potentials(sys, omega, f);
  for (std::size_t n = 0; n < nodes.size(); ++n)
    out.min_potential = std::min(out.min_potential, pot[n] * out.capacity);

  out.invariants_ok =
      out.mass_norm_residual <= 1e-8 && out.min_potential >= 1.0 - 1e-6;
  return out;
}

}  // namespace gvp
