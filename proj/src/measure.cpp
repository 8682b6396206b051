#include "gvp/measure.hpp"

#include <algorithm>
#include <cmath>

#include "gvp/simd.hpp"

namespace gvp {

namespace {

bool point_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

void ScalarSignedMeasure::canonicalize() {
  std::vector<ScalarAtom> kept;
  kept.reserve(atoms.size());
  for (const auto& a : atoms)
    if (a.weight != 0.0) kept.push_back(a);
  std::sort(kept.begin(), kept.end(), [](const ScalarAtom& a, const ScalarAtom& b) {
    if (a.where != b.where) return point_less(a.where, b.where);
    return a.weight > b.weight;  // positive part first at a shared location
  });
  atoms.clear();
  for (const auto& a : kept) {
    if (!atoms.empty() && same_point(atoms.back().where, a.where) &&
        (atoms.back().weight > 0) == (a.weight > 0)) {
      atoms.back().weight += a.weight;
    } else {
      atoms.push_back(a);
    }
  }
}

double ScalarSignedMeasure::total_positive() const {
  double s = 0.0;
  for (const auto& a : atoms)
    if (a.weight > 0) s += a.weight;
  return s;
}

double ScalarSignedMeasure::total_negative() const {
  double s = 0.0;
  for (const auto& a : atoms)
    if (a.weight < 0) s -= a.weight;
  return s;
}

ExternalField ExternalField::zero(const Condenser& c) {
  ExternalField f;
  f.mode = FieldMode::tabulated;
  for (const auto& p : c.plates) f.values.emplace_back(p.nodes.size(), 0.0);
  return f;
}

ExternalField ExternalField::tabulated(std::vector<std::vector<double>> values) {
  ExternalField f;
  f.mode = FieldMode::tabulated;
  f.values = std::move(values);
  return f;
}

ExternalField ExternalField::from_scalar_source(ScalarSignedMeasure sigma) {
  ExternalField f;
  f.mode = FieldMode::scalar_source;
  sigma.canonicalize();
  f.sigma = std::move(sigma);
  return f;
}

ExternalField ExternalField::from_vector_source(DiscreteVectorMeasure nu) {
  ExternalField f;
  f.mode = FieldMode::vector_source;
  f.nu = std::move(nu);
  return f;
}

ExternalField ExternalField::lsc_nonnegative(std::vector<std::vector<double>> values) {
  for (const auto& plate : values)
    for (double v : plate)
      if (!(v >= 0.0))
        fail(Errc::validation_error, "lsc field values must be nonnegative");
  ExternalField f;
  f.mode = FieldMode::lsc;
  f.values = std::move(values);
  return f;
}

DiscreteVectorMeasure zero_measure(const Condenser& c) {
  DiscreteVectorMeasure mu;
  for (const auto& p : c.plates) mu.weights.emplace_back(p.nodes.size(), 0.0);
  return mu;
}

void require_compatible(const System& sys, const DiscreteVectorMeasure& mu) {
  if (mu.weights.size() != sys.plate_count())
    fail(Errc::condenser_mismatch, "measure plate count does not match condenser");
  for (std::size_t i = 0; i < mu.weights.size(); ++i) {
    if (mu.weights[i].size() != sys.plate_size(i))
      fail(Errc::condenser_mismatch, "measure weight length does not match plate");
    for (double w : mu.weights[i])
      if (!(w >= 0.0))
        fail(Errc::validation_error, "measure weights must be nonnegative");
  }
}

std::vector<double> stack_weights(const System& sys, const DiscreteVectorMeasure& mu) {
  require_compatible(sys, mu);
  std::vector<double> w;
  w.reserve(sys.node_count());
  for (const auto& plate : mu.weights) w.insert(w.end(), plate.begin(), plate.end());
  return w;
}

DiscreteVectorMeasure unstack_weights(const System& sys, const std::vector<double>& w) {
  DiscreteVectorMeasure mu;
  for (std::size_t i = 0; i < sys.plate_count(); ++i) {
    const std::size_t off = sys.offset(i);
    mu.weights.emplace_back(w.begin() + off, w.begin() + off + sys.plate_size(i));
  }
  return mu;
}

namespace {

// Signed stacked weights: u = sign .* w.
std::vector<double> signed_stack(const System& sys, const DiscreteVectorMeasure& mu) {
  std::vector<double> u = stack_weights(sys, mu);
  for (std::size_t p = 0; p < u.size(); ++p) u[p] *= sys.node_sign(p);
  return u;
}

}  // namespace

double mutual_energy(const System& sys, const DiscreteVectorMeasure& mu,
                     const DiscreteVectorMeasure& mu1) {
  const std::vector<double> u = signed_stack(sys, mu);
  const std::vector<double> v = signed_stack(sys, mu1);
  std::vector<double> kv(v.size());
  sys.matvec(v.data(), kv.data());
  return simd::active_ops().dot(u.data(), kv.data(), u.size());
}

double vector_potential(const System& sys, const DiscreteVectorMeasure& mu,
                        std::size_t plate, const Point& x) {
  require_compatible(sys, mu);
  if (plate >= sys.plate_count())
    fail(Errc::condenser_mismatch, "plate index out of range");
  const double si = sys.sign(plate);
  double total = 0.0;
  for (std::size_t j = 0; j < sys.plate_count(); ++j) {
    const double sj = sys.sign(j);
    const auto& nodes = sys.condenser().plates[j].nodes;
    double acc = 0.0;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      const double w = mu.weights[j][n];
      if (w != 0.0) acc += w * sys.kernel_pair(x, nodes[n]);
    }
    total += si * sj * acc;
  }
  return total;
}

ScalarSignedMeasure r_map(const Condenser& c, const DiscreteVectorMeasure& mu) {
  if (mu.weights.size() != c.plates.size())
    fail(Errc::condenser_mismatch, "measure plate count does not match condenser");
  ScalarSignedMeasure s;
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    const Plate& p = c.plates[i];
    if (mu.weights[i].size() != p.nodes.size())
      fail(Errc::condenser_mismatch, "measure weight length does not match plate");
    for (std::size_t n = 0; n < p.nodes.size(); ++n) {
      const double w = mu.weights[i][n];
      if (w != 0.0)
        s.atoms.push_back({p.nodes[n], static_cast<double>(p.sign) * w});
    }
  }
  s.canonicalize();
  return s;
}

double scalar_energy(const System& sys, const ScalarSignedMeasure& s,
                     const ScalarSignedMeasure& s1) {
  double total = 0.0;
  for (const auto& a : s.atoms)
    for (const auto& b : s1.atoms)
      total += a.weight * b.weight * sys.kernel_pair(a.where, b.where);
  return total;
}

double scalar_potential(const System& sys, const ScalarSignedMeasure& s, const Point& x) {
  double total = 0.0;
  for (const auto& a : s.atoms) total += a.weight * sys.kernel_pair(x, a.where);
  return total;
}

double semimetric_distance(const System& sys, const DiscreteVectorMeasure& mu1,
                           const DiscreteVectorMeasure& mu2) {
  const std::vector<double> u = signed_stack(sys, mu1);
  std::vector<double> d = signed_stack(sys, mu2);
  for (std::size_t p = 0; p < d.size(); ++p) d[p] = u[p] - d[p];
  std::vector<double> kd(d.size());
  sys.matvec(d.data(), kd.data());
  const double radicand = simd::active_ops().dot(d.data(), kd.data(), d.size());
  constexpr double kRadicandTol = 1e-10;
  if (radicand < -kRadicandTol)
    fail(Errc::negative_radicand, "semimetric radicand is negative; gram is not psd");
  return std::sqrt(std::max(0.0, radicand));
}

FieldValues field_values(const System& sys, const ExternalField& f) {
  const Condenser& c = sys.condenser();
  switch (f.mode) {
    case FieldMode::tabulated:
    case FieldMode::lsc: {
      if (f.values.size() != c.plates.size())
        fail(Errc::condenser_mismatch, "field plate count does not match condenser");
      for (std::size_t i = 0; i < c.plates.size(); ++i) {
        if (f.values[i].size() != c.plates[i].nodes.size())
          fail(Errc::condenser_mismatch, "field value length does not match plate");
        for (double v : f.values[i]) {
          if (std::isnan(v) || v == -kInf)
            fail(Errc::validation_error, "field values must be finite or +inf");
          if (f.mode == FieldMode::lsc && !(v >= 0.0))
            fail(Errc::validation_error, "lsc field values must be nonnegative");
        }
      }
      return f.values;
    }
    case FieldMode::scalar_source:
    case FieldMode::vector_source: {
      ScalarSignedMeasure sigma =
          f.mode == FieldMode::scalar_source ? f.sigma : r_map(c, f.nu);
      FieldValues out;
      for (std::size_t i = 0; i < c.plates.size(); ++i) {
        const Plate& p = c.plates[i];
        std::vector<double> vals(p.nodes.size());
        for (std::size_t n = 0; n < p.nodes.size(); ++n)
          vals[n] = static_cast<double>(p.sign) * scalar_potential(sys, sigma, p.nodes[n]);
        out.push_back(std::move(vals));
      }
      return out;
    }
  }
  fail(Errc::internal_error, "unknown field mode");
}

std::vector<double> weighted_potentials(const System& sys,
                                        const DiscreteVectorMeasure& mu,
                                        const FieldValues& f) {
  const std::vector<double> u = signed_stack(sys, mu);
  std::vector<double> pot(u.size());
  sys.matvec(u.data(), pot.data());
  for (std::size_t i = 0; i < sys.plate_count(); ++i) {
    const std::size_t off = sys.offset(i);
    for (std::size_t n = 0; n < sys.plate_size(i); ++n) {
      const std::size_t p = off + n;
      pot[p] = sys.node_sign(p) * pot[p] + f[i][n];
    }
  }
  return pot;
}

double weighted_potential(const System& sys, const DiscreteVectorMeasure& mu,
                          const FieldValues& f, std::size_t plate, std::size_t node) {
  const Point& x = sys.condenser().plates[plate].nodes[node];
  return vector_potential(sys, mu, plate, x) + f[plate][node];
}

double field_pairing(const FieldValues& f, const DiscreteVectorMeasure& mu) {
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t n = 0; n < f[i].size(); ++n) {
      const double w = mu.weights[i][n];
      if (w == 0.0) continue;  // 0 * inf = 0
      if (f[i][n] == kInf) return kInf;
      total += w * f[i][n];
    }
  }
  return total;
}

double weighted_energy(const System& sys, const DiscreteVectorMeasure& mu,
                       const FieldValues& f) {
  const double pairing = field_pairing(f, mu);
  if (pairing == kInf) return kInf;
  return mutual_energy(sys, mu, mu) + 2.0 * pairing;
}

double g_mass(const Condenser& c, const DiscreteVectorMeasure& mu, std::size_t plate) {
  const Plate& p = c.plates[plate];
  return simd::active_ops().dot(p.g.data(), mu.weights[plate].data(),
                                std::min(p.g.size(), mu.weights[plate].size()));
}

ScalarSignedMeasure scalar_sum(const ScalarSignedMeasure& a,
                               const ScalarSignedMeasure& b) {
  ScalarSignedMeasure out;
  out.atoms = a.atoms;
  out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
  // Merge across signs here: the sum of two measures combines shared atoms.
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const ScalarAtom& x, const ScalarAtom& y) {
              return point_less(x.where, y.where);
            });
  std::vector<ScalarAtom> merged;
  for (const auto& atom : out.atoms) {
    if (!merged.empty() && same_point(merged.back().where, atom.where))
      merged.back().weight += atom.weight;
    else
      merged.push_back(atom);
  }
  out.atoms.clear();
  for (const auto& atom : merged)
    if (atom.weight != 0.0) out.atoms.push_back(atom);
  return out;
}

ScalarSignedMeasure scalar_difference(const ScalarSignedMeasure& a,
                                      const ScalarSignedMeasure& b) {
  ScalarSignedMeasure neg;
  neg.atoms = b.atoms;
  for (auto& atom : neg.atoms) atom.weight = -atom.weight;
  return scalar_sum(a, neg);
}

}  // namespace gvp
