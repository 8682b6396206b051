#pragma once

// Shared test utilities: deterministic instance generators and a
// support-enumeration oracle for the constrained quadratic program. The
// oracle never touches the solver's iteration path: it enumerates support
// patterns and solves the equality-constrained stationarity system per
// pattern, which for a convex objective contains the global minimizer.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "gvp/certify.hpp"
#include "gvp/measure.hpp"
#include "gvp/solver.hpp"
#include "gvp/system.hpp"

namespace gvp::testing {

using Rng = std::mt19937_64;

struct TestInstance {
  Kernel kernel = Kernel::custom(Matrix(1, 1, 1.0));
  Condenser condenser;
  ExternalField field;
};

inline Matrix random_spd_matrix(Rng& rng, std::size_t n, double ridge = 0.5) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = gauss(rng);
  Eigen::MatrixXd k = b.transpose() * b;
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = 0.5 * (k(i, j) + k(j, i));
    out(i, i) += ridge;
  }
  return out;
}

struct InstanceOptions {
  std::size_t min_nodes = 2;
  std::size_t max_nodes = 6;
  std::size_t max_plates = 3;
  bool allow_negative = true;
  bool allow_shared_nodes = false;  // equally signed plates sharing a node
  bool allow_infinite_field = false;
  bool zero_field = false;
};

// Random strictly-PD custom-matrix instance over index nodes.
inline TestInstance random_custom_instance(Rng& rng, const InstanceOptions& opt = {}) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const std::size_t total =
      opt.min_nodes + rng() % (opt.max_nodes - opt.min_nodes + 1);
  const std::size_t nplates = 1 + rng() % std::min(opt.max_plates, total);

  // Partition indices 0..total-1 into consecutive plate ranges.
  std::vector<std::size_t> cuts = {0, total};
  while (cuts.size() < nplates + 1) {
    const std::size_t c = 1 + rng() % (total - 1);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());

  TestInstance inst;
  inst.kernel = Kernel::custom(random_spd_matrix(rng, total));

  std::vector<int> signs(nplates, +1);
  if (opt.allow_negative)
    for (std::size_t i = 1; i < nplates; ++i) signs[i] = unit(rng) < 0.4 ? -1 : +1;

  for (std::size_t i = 0; i < nplates; ++i) {
    Plate p;
    p.id = static_cast<int>(i);
    p.sign = signs[i];
    for (std::size_t n = cuts[i]; n < cuts[i + 1]; ++n)
      p.nodes.push_back({static_cast<double>(n)});
    // Equally signed plates may share nodes; borrow one from a same-sign
    // neighbour occasionally.
    if (opt.allow_shared_nodes && i > 0 && signs[i] == signs[i - 1] &&
        unit(rng) < 0.5) {
      p.nodes.push_back({static_cast<double>(cuts[i] - 1)});
    }
    p.g.clear();
    for (std::size_t n = 0; n < p.nodes.size(); ++n) p.g.push_back(0.5 + 1.5 * unit(rng));
    p.mass = 0.5 + 1.5 * unit(rng);
    inst.condenser.plates.push_back(std::move(p));
  }

  std::vector<std::vector<double>> fvals;
  for (const auto& p : inst.condenser.plates) {
    std::vector<double> row(p.nodes.size(), 0.0);
    if (!opt.zero_field) {
      for (double& v : row) v = gauss(rng);
      if (opt.allow_infinite_field && p.nodes.size() > 1 && unit(rng) < 0.3)
        row[rng() % row.size()] = kInf;
    }
    fvals.push_back(std::move(row));
  }
  inst.field = ExternalField::tabulated(std::move(fvals));
  return inst;
}

// Random geometric Riesz instance: one positive and optionally one negative
// plate, separated clusters in R^3.
inline TestInstance random_riesz_instance(Rng& rng, std::size_t nodes_per_plate,
                                          bool with_negative, bool zero_field = true) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  TestInstance inst;
  inst.kernel = Kernel::riesz(2.0, 3);

  auto make_plate = [&](int id, int sign, double z_offset) {
    Plate p;
    p.id = id;
    p.sign = sign;
    while (p.nodes.size() < nodes_per_plate) {
      Point x = {unit(rng), unit(rng), z_offset + 0.3 * unit(rng)};
      bool dup = false;
      for (const auto& y : p.nodes) dup = dup || same_point(x, y);
      if (!dup) p.nodes.push_back(std::move(x));
    }
    for (std::size_t n = 0; n < p.nodes.size(); ++n) p.g.push_back(0.5 + unit(rng));
    p.mass = 0.5 + unit(rng);
    return p;
  };
  inst.condenser.plates.push_back(make_plate(0, +1, 0.0));
  if (with_negative) inst.condenser.plates.push_back(make_plate(1, -1, 2.0));

  std::vector<std::vector<double>> fvals;
  for (const auto& p : inst.condenser.plates) {
    std::vector<double> row(p.nodes.size(), 0.0);
    if (!zero_field)
      for (double& v : row) v = 0.5 * gauss(rng);
    fvals.push_back(std::move(row));
  }
  inst.field = ExternalField::tabulated(std::move(fvals));
  return inst;
}

// Uniform random feasible measure: random positive weights on the
// finite-field nodes, rescaled to the plate masses.
inline DiscreteVectorMeasure random_feasible_measure(Rng& rng, const System& sys,
                                                     const FieldValues& f) {
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  DiscreteVectorMeasure mu = zero_measure(sys.condenser());
  for (std::size_t i = 0; i < sys.plate_count(); ++i) {
    const Plate& p = sys.condenser().plates[i];
    double m = 0.0;
    for (std::size_t n = 0; n < p.nodes.size(); ++n) {
      if (f[i][n] == kInf) continue;
      mu.weights[i][n] = unit(rng);
      m += p.g[n] * mu.weights[i][n];
    }
    for (double& w : mu.weights[i]) w *= p.mass / m;
  }
  return mu;
}

// ---------------------------------------------------------------------------
// Support-enumeration oracle.

struct OracleResult {
  double value = kInf;
  DiscreteVectorMeasure minimizer;
  bool found = false;
};

inline OracleResult oracle_minimum(const System& sys, const FieldValues& f) {
  const Condenser& c = sys.condenser();
  const std::size_t nplates = sys.plate_count();

  // Usable nodes per plate (finite field), as stacked indices.
  std::vector<std::vector<std::size_t>> usable(nplates);
  for (std::size_t i = 0; i < nplates; ++i)
    for (std::size_t n = 0; n < sys.plate_size(i); ++n)
      if (f[i][n] != kInf) usable[i].push_back(sys.offset(i) + n);

  std::vector<double> fs;
  for (const auto& row : f) fs.insert(fs.end(), row.begin(), row.end());

  OracleResult best;
  std::vector<std::size_t> mask(nplates, 1);  // nonzero bitmask per plate

  const auto evaluate_pattern = [&]() {
    std::vector<std::size_t> support;  // stacked indices
    std::vector<std::size_t> plate_of;
    for (std::size_t i = 0; i < nplates; ++i)
      for (std::size_t b = 0; b < usable[i].size(); ++b)
        if (mask[i] & (std::size_t{1} << b)) {
          support.push_back(usable[i][b]);
          plate_of.push_back(i);
        }
    const std::size_t m = support.size();
    const std::size_t dim = m + nplates;

    // Stationarity system: 2 Q w + 2 f = G' nu, G w = a, with
    // Q = sign-weighted gram on the support.
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = 0; q < m; ++q)
        kkt(p, q) = 2.0 * sys.node_sign(support[p]) * sys.node_sign(support[q]) *
                    sys.gram()(support[p], support[q]);
      kkt(p, m + plate_of[p]) = -sys.g(support[p]);
      kkt(m + plate_of[p], p) = sys.g(support[p]);
      rhs(p) = -2.0 * fs[support[p]];
    }
    for (std::size_t i = 0; i < nplates; ++i) rhs(m + i) = c.plates[i].mass;

    Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    if ((kkt * sol - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm())) return;

    for (std::size_t p = 0; p < m; ++p)
      if (sol(p) < -1e-11) return;

    std::vector<double> w(sys.node_count(), 0.0);
    for (std::size_t p = 0; p < m; ++p) w[support[p]] = std::max(0.0, sol(p));
    double energy = 0.0, pairing = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      pairing += w[support[p]] * fs[support[p]];
      for (std::size_t q = 0; q < m; ++q)
        energy += w[support[p]] * w[support[q]] * sys.node_sign(support[p]) *
                  sys.node_sign(support[q]) * sys.gram()(support[p], support[q]);
    }
    const double value = energy + 2.0 * pairing;
    if (value < best.value) {
      best.value = value;
      best.found = true;
      best.minimizer = unstack_weights(sys, w);
    }
  };

  // Odometer over nonzero masks of every plate.
  std::vector<std::size_t> limit(nplates);
  for (std::size_t i = 0; i < nplates; ++i)
    limit[i] = (std::size_t{1} << usable[i].size()) - 1;
  while (true) {
    evaluate_pattern();
    std::size_t i = 0;
    for (; i < nplates; ++i) {
      if (mask[i] < limit[i]) {
        ++mask[i];
        break;
      }
      mask[i] = 1;
    }
    if (i == nplates) break;
  }
  return best;
}

// Literal barycentric grid search, usable only for very small shapes; cross
// checks the enumeration oracle in the unit tests.
inline double grid_minimum(const System& sys, const FieldValues& f,
                           std::size_t resolution) {
  const Condenser& c = sys.condenser();
  std::vector<std::vector<std::vector<double>>> plate_grids;  // per plate, list of weight rows
  for (std::size_t i = 0; i < sys.plate_count(); ++i) {
    const Plate& p = c.plates[i];
    std::vector<std::vector<double>> rows;
    // enumerate compositions of `resolution` into node_count parts
    const std::size_t k = p.nodes.size();
    std::vector<std::size_t> idx(k, 0);
    const std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos,
                                                                  std::size_t left) {
      if (pos + 1 == k) {
        idx[pos] = left;
        // convex coefficients -> weights via w_n = t_n * a / g_n
        std::vector<double> w(k);
        for (std::size_t n = 0; n < k; ++n)
          w[n] = (static_cast<double>(idx[n]) / resolution) * p.mass / p.g[n];
        rows.push_back(w);
        return;
      }
      for (std::size_t t = 0; t <= left; ++t) {
        idx[pos] = t;
        rec(pos + 1, left - t);
      }
    };
    rec(0, resolution);
    plate_grids.push_back(std::move(rows));
  }

  double best = kInf;
  std::vector<std::size_t> pick(sys.plate_count(), 0);
  while (true) {
    DiscreteVectorMeasure mu = zero_measure(c);
    for (std::size_t i = 0; i < sys.plate_count(); ++i)
      mu.weights[i] = plate_grids[i][pick[i]];
    best = std::min(best, weighted_energy(sys, mu, f));
    std::size_t i = 0;
    for (; i < sys.plate_count(); ++i) {
      if (++pick[i] < plate_grids[i].size()) break;
      pick[i] = 0;
    }
    if (i == sys.plate_count()) break;
  }
  return best;
}

}  // namespace gvp::testing
