#pragma once

#include <vector>

#include "gvp/system.hpp"
#include "gvp/types.hpp"

namespace gvp {

// Nonnegative node weights per plate; the discrete vector measure.
struct DiscreteVectorMeasure {
  std::vector<std::vector<double>> weights;
};

struct ScalarAtom {
  Point where;
  double weight = 0.0;
};

// Finite signed atomic measure, canonically sorted by location with
// same-sign atoms at one point merged. Opposite-sign atoms at one point are
// kept apart so the positive and negative parts stay intact.
struct ScalarSignedMeasure {
  std::vector<ScalarAtom> atoms;

  void canonicalize();
  double total_positive() const;
  double total_negative() const;  // as a nonnegative number
};

enum class FieldMode { tabulated, scalar_source, vector_source, lsc };

struct ExternalField {
  FieldMode mode = FieldMode::tabulated;
  std::vector<std::vector<double>> values;  // tabulated / lsc; +inf allowed
  ScalarSignedMeasure sigma;                // scalar_source
  DiscreteVectorMeasure nu;                 // vector_source

  static ExternalField zero(const Condenser& c);
  static ExternalField tabulated(std::vector<std::vector<double>> values);
  static ExternalField from_scalar_source(ScalarSignedMeasure sigma);
  static ExternalField from_vector_source(DiscreteVectorMeasure nu);
  static ExternalField lsc_nonnegative(std::vector<std::vector<double>> values);
};

// Per-plate per-node field values in extended reals (+inf allowed).
using FieldValues = std::vector<std::vector<double>>;

// --- measure construction / validation --------------------------------------

DiscreteVectorMeasure zero_measure(const Condenser& c);
void require_compatible(const System& sys, const DiscreteVectorMeasure& mu);

// Stacked-layout helpers.
std::vector<double> stack_weights(const System& sys, const DiscreteVectorMeasure& mu);
DiscreteVectorMeasure unstack_weights(const System& sys, const std::vector<double>& w);

// --- energies and potentials -------------------------------------------------

// Sign-weighted bilinear energy of two vector measures on the same condenser.
double mutual_energy(const System& sys, const DiscreteVectorMeasure& mu,
                     const DiscreteVectorMeasure& mu1);

// i-th component of the vector potential at an arbitrary point.
double vector_potential(const System& sys, const DiscreteVectorMeasure& mu,
                        std::size_t plate, const Point& x);

// Scalar image: signed sum of the plate measures.
ScalarSignedMeasure r_map(const Condenser& c, const DiscreteVectorMeasure& mu);

// Bilinear energy of scalar atomic measures (diagonal rule on coincident atoms).
double scalar_energy(const System& sys, const ScalarSignedMeasure& s,
                     const ScalarSignedMeasure& s1);

// Potential of a scalar atomic measure at a point.
double scalar_potential(const System& sys, const ScalarSignedMeasure& s, const Point& x);

// Energy-seminorm distance between vector measures. Radicands in
// [-1e-10, 0] clamp to zero; anything lower reports a broken Gram.
double semimetric_distance(const System& sys, const DiscreteVectorMeasure& mu1,
                           const DiscreteVectorMeasure& mu2);

// Resolves an external field to per-plate per-node values.
FieldValues field_values(const System& sys, const ExternalField& f);

// kappa_mu^i(x) + f_i(x) at a grid node.
double weighted_potential(const System& sys, const DiscreteVectorMeasure& mu,
                          const FieldValues& f, std::size_t plate, std::size_t node);

// All weighted potentials over the stacked index.
std::vector<double> weighted_potentials(const System& sys,
                                        const DiscreteVectorMeasure& mu,
                                        const FieldValues& f);

// G_f(mu) = energy + 2 <f, mu>; +inf when weight sits on an infinite-field
// node (zero weights never poison the sum).
double weighted_energy(const System& sys, const DiscreteVectorMeasure& mu,
                       const FieldValues& f);

// <f, mu> under the 0 * inf = 0 rule.
double field_pairing(const FieldValues& f, const DiscreteVectorMeasure& mu);

// <g_i, mu^i>.
double g_mass(const Condenser& c, const DiscreteVectorMeasure& mu, std::size_t plate);

// Difference of scalar measures as one canonical atom list (zero atoms dropped).
ScalarSignedMeasure scalar_difference(const ScalarSignedMeasure& a,
                                      const ScalarSignedMeasure& b);
ScalarSignedMeasure scalar_sum(const ScalarSignedMeasure& a,
                               const ScalarSignedMeasure& b);

}  // namespace gvp
