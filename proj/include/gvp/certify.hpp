#pragma once

#include <vector>

#include "gvp/measure.hpp"
#include "gvp/solver.hpp"
#include "gvp/system.hpp"

namespace gvp {

// One pointwise variational check over a plate. Residuals are the signed
// worst cases, never clipped; `ok` applies the tolerance.
struct PlateCheck {
  bool ok = true;
  double worst_residual = 0.0;
  int worst_node = -1;
};

struct ConstantRecord {
  double inner = 0.0;        // <W^i, lambda^i>
  double inf_form = 0.0;     // min_x a_i W^i(x) / g_i(x)
  double discrepancy = 0.0;  // inner - inf_form
};

struct CertificateResult {
  std::vector<PlateCheck> lower;            // a_i W >= C^i g at every node
  std::vector<PlateCheck> support_upper;    // a_i W <= C^i g on the support
  std::vector<PlateCheck> complementarity;  // equality on the support
  double value_identity_residual = 0.0;     // |G_f - sum C^i - <f,mu>|
  bool value_identity_ok = true;
  std::vector<ConstantRecord> constants;
  std::vector<double> eta;                  // echo of externally supplied eta
  CrossSupResult cross_sup;                 // hypothesis record for the upper check
  double tol = 0.0;

  bool all_ok() const;
};

CertificateResult certify_equilibrium(const System& sys, const FieldValues& f,
                                      const DiscreteVectorMeasure& lambda,
                                      double tol,
                                      double support_threshold = 1e-8);

struct EtaCertificate {
  bool side_a_ok = false;  // pointwise lower bounds plus the value upper bound
  bool side_b_ok = false;  // support upper bounds plus the value lower bound
  bool certified = false;
  bool eta_matches_constants = false;
  std::vector<double> inner_products;  // <W^i, mu^i> for comparison with eta
};

EtaCertificate check_eta_certificate(const System& sys, const FieldValues& f,
                                     const DiscreteVectorMeasure& mu,
                                     const std::vector<double>& eta,
                                     double value_bound, double tol,
                                     double support_threshold = 1e-8);

struct UniquenessReport {
  std::size_t pair_count = 0;
  bool all_ok = true;
  double max_distance = 0.0;        // semimetric between solutions
  double max_pairing_diff = 0.0;    // field pairings
  double max_potential_diff = 0.0;  // weighted potentials, sup over nodes
  double max_constant_diff = 0.0;   // equilibrium constants
  double max_r_image_diff = 0.0;    // atom maps, only when the gram is strictly pd
  bool strict_checked = false;
};

UniquenessReport uniqueness_battery(const System& sys, const FieldValues& f,
                                    const std::vector<DiscreteVectorMeasure>& lambdas,
                                    double tol);

struct CapacityResult {
  double capacity = 0.0;       // C(E)
  double robin_constant = 0.0; // 1 / C(E)
  std::vector<double> theta;   // node weights of the interior equilibrium measure
  double min_potential = 0.0;  // min over nodes of kappa(x, theta)
  double mass_norm_residual = 0.0;  // max relative defect of mass = norm^2 = C
  double gap = 0.0;
  bool invariants_ok = false;
};

// Interior equilibrium measure of a node set: minimize the energy over
// probability measures, then rescale so the potential is >= 1 everywhere.
CapacityResult scalar_equilibrium(const Kernel& k, const std::vector<Point>& nodes,
                                  double tol);

}  // namespace gvp
