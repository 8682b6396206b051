// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gvp/certify.hpp"
#include "gvp/exhaust.hpp"
#include "gvp/measure.hpp"
#include "gvp/solver.hpp"
#include "helpers.hpp"

using namespace gvp;
using namespace gvp::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void expect(Outcome& out, bool cond, const std::string& what) {
  if (!cond) {
    out.pass = false;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += what;
  }
}

TestInstance example_a() {
  TestInstance inst;
  Matrix m(2, 2);
  m(0, 0) = 2; m(0, 1) = 1; m(1, 0) = 1; m(1, 1) = 2;
  inst.kernel = Kernel::custom(m);
  Plate p;
  p.id = 0;
  p.sign = +1;
  p.nodes = {{0}, {1}};
  p.g = {1.0, 1.0};
  p.mass = 1.0;
  inst.condenser.plates = {p};
  inst.field = ExternalField::zero(inst.condenser);
  return inst;
}

TestInstance example_b() {
  TestInstance inst = example_a();
  inst.field = ExternalField::tabulated({{0.0, 10.0}});
  return inst;
}

TestInstance example_c() {
  TestInstance inst;
  Matrix m(2, 2);
  m(0, 0) = 2; m(0, 1) = 1; m(1, 0) = 1; m(1, 1) = 2;
  inst.kernel = Kernel::custom(m);
  Plate pos;
  pos.id = 0;
  pos.sign = +1;
  pos.nodes = {{0}};
  pos.g = {1.0};
  pos.mass = 1.0;
  Plate neg = pos;
  neg.id = 1;
  neg.sign = -1;
  neg.nodes = {{1}};
  inst.condenser.plates = {pos, neg};
  inst.field = ExternalField::zero(inst.condenser);
  return inst;
}

// --- criterion 1 ------------------------------------------------------------

Outcome criterion_closed_forms() {
  Outcome out;
  SolverConfig cfg;
  cfg.gap_tol_abs = 1e-10;
  cfg.gap_tol_rel = 0.0;

  struct Expect {
    TestInstance inst;
    std::vector<double> lambda0;
    double value;
    double constant0;
    const char* name;
  };
  std::vector<Expect> cases;
  cases.push_back({example_a(), {0.5, 0.5}, 1.5, 1.5, "A"});
  cases.push_back({example_b(), {1.0, 0.0}, 2.0, 2.0, "B"});
  cases.push_back({example_c(), {1.0}, 2.0, 1.0, "C"});  // value 2 splits into C = (1, 1)

  for (const auto& c : cases) {
    const auto t0 = Clock::now();
    const System sys(c.inst.kernel, c.inst.condenser);
    const FieldValues f = field_values(sys, c.inst.field);
    const EquilibriumReport rep = solve(sys, f, cfg);
    const double dt = seconds_since(t0);

    expect(out, std::fabs(rep.value - c.value) <= 1e-7,
           std::string("example ") + c.name + " value");
    expect(out, rep.gap <= 1e-9, std::string("example ") + c.name + " gap");
    for (std::size_t n = 0; n < c.lambda0.size(); ++n)
      expect(out, std::fabs(rep.lambda.weights[0][n] - c.lambda0[n]) <= 1e-7,
             std::string("example ") + c.name + " lambda");
    expect(out, std::fabs(rep.constants[0] - c.constant0) <= 1e-7,
           std::string("example ") + c.name + " constant");
    expect(out, dt < 0.05, std::string("example ") + c.name + " runtime");
  }
  return out;
}

// --- criterion 2 ------------------------------------------------------------

Outcome criterion_certificates() {
  Outcome out;
  const auto t0 = Clock::now();
  Rng rng(611001);
  int done = 0;
  int negatives = 0;
  while (done < 200) {
    const TestInstance inst = random_custom_instance(rng);
    const System sys(inst.kernel, inst.condenser);
    const FieldValues f = field_values(sys, inst.field);
    const OracleResult oracle = oracle_minimum(sys, f);
    if (!oracle.found) continue;

    // Skip instances whose optimum has borderline-tiny support weights:
    // those sit inside the tolerance gray band of the iff claim.
    bool borderline = false;
    for (std::size_t i = 0; i < sys.plate_count(); ++i)
      for (std::size_t n = 0; n < sys.plate_size(i); ++n) {
        const double w = oracle.minimizer.weights[i][n];
        const double unit = sys.condenser().plates[i].mass /
                            (sys.condenser().plates[i].g[n] *
                             static_cast<double>(sys.plate_size(i)));
        if (w > 0.0 && w < 1e-4 * unit) borderline = true;
      }
    if (borderline) continue;
    ++done;

    SolverConfig cfg;
    cfg.gap_tol_abs = 1e-13;
    cfg.gap_tol_rel = 0.0;
    const EquilibriumReport rep = solve(sys, f, cfg);
    const double scale = std::max(1.0, std::fabs(oracle.value));

    expect(out, std::fabs(rep.value - oracle.value) <= 1e-4,
           "solver value differs from the enumeration oracle");

    // Optimal candidate: tiny oracle gap and a passing certificate.
    const double subopt = rep.value - oracle.value;
    const bool should_pass = subopt <= 1e-6 * scale;
    const bool does_pass = certify_equilibrium(sys, f, rep.lambda, 1e-6).all_ok();
    expect(out, should_pass == does_pass, "iff failed on the solved measure");

    // Clearly suboptimal candidate: certificate must refuse it.
    for (int tries = 0; tries < 8; ++tries) {
      const DiscreteVectorMeasure bad = random_feasible_measure(rng, sys, f);
      const double bad_subopt = weighted_energy(sys, bad, f) - oracle.value;
      if (bad_subopt >= 1e-2 * scale) {
        const bool bad_pass = certify_equilibrium(sys, f, bad, 1e-6).all_ok();
        expect(out, !bad_pass, "iff failed on a suboptimal measure");
        ++negatives;
        break;
      }
    }
  }
  expect(out, negatives >= 150, "not enough suboptimal candidates exercised");
  expect(out, seconds_since(t0) < 60.0, "criterion 2 runtime");
  return out;
}

// --- criterion 3 ------------------------------------------------------------

Outcome criterion_r_map_identities() {
  Outcome out;
  const auto t0 = Clock::now();
  Rng rng(611002);
  InstanceOptions opt;
  opt.allow_shared_nodes = true;
  int measures = 0;
  while (measures < 500) {
    const TestInstance inst = random_custom_instance(rng, opt);
    const System sys(inst.kernel, inst.condenser);
    const FieldValues f = field_values(sys, inst.field);
    for (int k = 0; k < 5 && measures < 500; ++k, ++measures) {
      const DiscreteVectorMeasure mu = random_feasible_measure(rng, sys, f);
      const DiscreteVectorMeasure mu1 = random_feasible_measure(rng, sys, f);

      const double e = mutual_energy(sys, mu, mu1);
      const double es = scalar_energy(sys, r_map(inst.condenser, mu),
                                      r_map(inst.condenser, mu1));
      expect(out, std::fabs(e - es) <= 1e-12 * (1.0 + std::fabs(e)),
             "energy identity");

      const ScalarSignedMeasure image = r_map(inst.condenser, mu);
      for (std::size_t i = 0; i < sys.plate_count(); ++i)
        for (const auto& x : inst.condenser.plates[i].nodes) {
          const double vp = vector_potential(sys, mu, i, x);
          const double sp = sys.sign(i) * scalar_potential(sys, image, x);
          expect(out, std::fabs(vp - sp) <= 1e-12 * (1.0 + std::fabs(vp)),
                 "potential identity");
        }

      const double dist = semimetric_distance(sys, mu, mu1);
      const ScalarSignedMeasure diff = scalar_difference(
          r_map(inst.condenser, mu), r_map(inst.condenser, mu1));
      const double rn = scalar_energy(sys, diff, diff);
      expect(out, std::fabs(dist * dist - rn) <= 1e-12 * (1.0 + dist * dist),
             "isometry identity");
    }
  }
  expect(out, seconds_since(t0) < 10.0, "criterion 3 runtime");
  return out;
}

// --- criterion 4 ------------------------------------------------------------

Outcome criterion_uniqueness() {
  Outcome out;
  const auto t0 = Clock::now();
  Rng rng(611003);
  for (int instance = 0; instance < 20; ++instance) {
    InstanceOptions opt;
    opt.min_nodes = 3;
    opt.max_nodes = 6;
    const TestInstance inst = random_custom_instance(rng, opt);
    const System sys(inst.kernel, inst.condenser);
    const FieldValues f = field_values(sys, inst.field);
    if (!sys.psd().strict) continue;

    std::vector<DiscreteVectorMeasure> solutions;
    SolverConfig cfg;
    cfg.gap_tol_abs = 1e-12;
    cfg.gap_tol_rel = 0.0;
    for (int init = 0; init < 10; ++init) {
      cfg.init = InitKind::vertex;
      cfg.vertex_init.clear();
      for (std::size_t i = 0; i < sys.plate_count(); ++i) {
        std::size_t n = rng() % sys.plate_size(i);
        while (f[i][n] == kInf) n = rng() % sys.plate_size(i);
        cfg.vertex_init.push_back(n);
      }
      solutions.push_back(solve(sys, f, cfg).lambda);
    }
    const UniquenessReport rep = uniqueness_battery(sys, f, solutions, 1e-5);
    expect(out, rep.all_ok, "uniqueness residuals above 1e-5");
  }
  expect(out, seconds_since(t0) < 60.0, "criterion 4 runtime");
  return out;
}

// --- criterion 5 ------------------------------------------------------------

Outcome criterion_exhaustion() {
  Outcome out;
  const auto t0 = Clock::now();
  Rng rng(611004);
  for (int instance = 0; instance < 20; ++instance) {
    TestInstance inst;
    ExhaustionOrder order;
    if (instance % 2 == 0) {
      InstanceOptions opt;
      opt.min_nodes = 4;
      opt.max_nodes = 8;
      opt.allow_infinite_field = false;
      inst = random_custom_instance(rng, opt);
      order = ExhaustionOrder::by_index;
    } else {
      inst = random_riesz_instance(rng, 5, true, false);
      order = ExhaustionOrder::by_distance_from_centroid;
    }
    const System sys(inst.kernel, inst.condenser);
    const FieldValues f = field_values(sys, inst.field);
    const ExhaustionSchedule schedule = make_exhaustion(inst.condenser, 4, order);
    SolverConfig cfg;
    cfg.gap_tol_abs = 1e-13;
    cfg.gap_tol_rel = 0.0;
    const ExhaustionReport rep = run_exhaustion(sys, f, schedule, cfg, 1e-5);
    expect(out, rep.monotone_ok, "values not monotone along the chain");
    expect(out, rep.final_distance <= 1e-5, "final semimetric distance");
    expect(out, rep.final_constants_diff <= 1e-5, "final constants");
    expect(out, rep.final_pairing_diff <= 1e-5, "final field pairing");
  }
  expect(out, seconds_since(t0) < 120.0, "criterion 5 runtime");
  return out;
}

// --- criterion 6 ------------------------------------------------------------

// Ring grid on the unit sphere: `rings` latitude bands of `per_ring` points,
// alternate rings staggered by half a step. Latitudes start at the
// equal-area positions and are Newton-tuned so every row of the regularized
// Newtonian gram matrix has the same sum; the discrete equilibrium measure
// of such a grid is exactly uniform.
struct RingGrid {
  int rings = 0;
  int per_ring = 0;
  std::vector<double> z;  // one latitude per ring
};

std::vector<Point> ring_nodes(const RingGrid& g) {
  std::vector<Point> nodes;
  nodes.reserve(static_cast<std::size_t>(g.rings) * g.per_ring);
  for (int r = 0; r < g.rings; ++r) {
    const double z = g.z[r];
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phase = 0.5 * (r % 2);
    for (int j = 0; j < g.per_ring; ++j) {
      const double a = 2.0 * M_PI * (j + phase) / g.per_ring;
      nodes.push_back({s * std::cos(a), s * std::sin(a), z});
    }
  }
  return nodes;
}

// Row sums of the regularized kernel matrix, one value per ring.
std::vector<double> ring_row_sums(const Kernel& k, const RingGrid& g) {
  const std::vector<Point> nodes = ring_nodes(g);
  const double h = k.diagonal().scale * min_spacing(nodes);
  std::vector<double> sums(g.rings, 0.0);
  for (int r = 0; r < g.rings; ++r) {
    const Point& x = nodes[static_cast<std::size_t>(r) * g.per_ring];
    double s = k.value_at_distance(h);
    for (const Point& y : nodes) {
      if (same_point(x, y)) continue;
      s += k.value_at_distance(distance(x, y));
    }
    sums[r] = s;
  }
  return sums;
}

bool tune_ring_grid(const Kernel& k, RingGrid& g, double rel_target) {
  const int m = g.rings;
  auto residuals = [&](const RingGrid& grid) {
    const std::vector<double> s = ring_row_sums(k, grid);
    double mean = 0.0;
    for (double v : s) mean += v / m;
    std::vector<double> r(m);
    for (int i = 0; i < m; ++i) r[i] = s[i] - mean;
    return std::pair(r, mean);
  };

  for (int iter = 0; iter < 60; ++iter) {
    auto [res, mean] = residuals(g);
    double worst = 0.0;
    for (double v : res) worst = std::max(worst, std::fabs(v));
    if (worst <= rel_target * mean) return true;

    // Numerical Jacobian d res / d z.
    Eigen::MatrixXd jac(m, m);
    const double eps = 1e-7;
    for (int c = 0; c < m; ++c) {
      RingGrid pert = g;
      pert.z[c] += eps;
      auto [res_p, mean_p] = residuals(pert);
      (void)mean_p;
      for (int r = 0; r < m; ++r) jac(r, c) = (res_p[r] - res[r]) / eps;
    }
    Eigen::VectorXd rhs(m);
    for (int r = 0; r < m; ++r) rhs(r) = -res[r];
    const Eigen::VectorXd step =
        jac.completeOrthogonalDecomposition().solve(rhs);

    double damp = 1.0;
    for (int halvings = 0; halvings < 12; ++halvings, damp *= 0.5) {
      RingGrid next = g;
      bool sane = true;
      for (int r = 0; r < m; ++r) {
        next.z[r] += damp * step(r);
        sane = sane && next.z[r] > -0.9999 && next.z[r] < 0.9999;
      }
      if (!sane) continue;
      auto [res_n, mean_n] = residuals(next);
      (void)mean_n;
      double worst_n = 0.0;
      for (double v : res_n) worst_n = std::max(worst_n, std::fabs(v));
      if (worst_n < worst) {
        g = next;
        break;
      }
    }
  }
  auto [res, mean] = residuals(g);
  double worst = 0.0;
  for (double v : res) worst = std::max(worst, std::fabs(v));
  return worst <= rel_target * mean;
}

RingGrid equal_area_grid(int rings, int per_ring) {
  RingGrid g;
  g.rings = rings;
  g.per_ring = per_ring;
  for (int r = 0; r < rings; ++r)
    g.z.push_back(1.0 - (2.0 * r + 1.0) / rings);
  return g;
}

Outcome criterion_capacity() {
  Outcome out;
  const auto t0 = Clock::now();

  // Generic invariants on random custom node sets.
  Rng rng(611005);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rng() % 5;
    const Kernel k = Kernel::custom(random_spd_matrix(rng, n));
    std::vector<Point> nodes;
    for (std::size_t i = 0; i < n; ++i) nodes.push_back({static_cast<double>(i)});
    const CapacityResult cap = scalar_equilibrium(k, nodes, 1e-9);
    expect(out, cap.mass_norm_residual <= 1e-8, "mass = norm^2 = C identity");
    expect(out, cap.min_potential >= 1.0 - 1e-6, "potential lower bound");
    expect(out, cap.invariants_ok, "capacity invariants flag");
  }

  // Sphere refinements.
  const Kernel newtonian = Kernel::newtonian(3);
  std::vector<double> capacities;
  for (const auto& [rings, per_ring] : {std::pair(10, 10), std::pair(20, 20),
                                        std::pair(40, 40)}) {
    RingGrid g = equal_area_grid(rings, per_ring);
    const bool tuned = tune_ring_grid(newtonian, g, 1e-10);
    expect(out, tuned, "ring grid row sums did not equalize");
    const std::vector<Point> nodes = ring_nodes(g);
    const CapacityResult cap = scalar_equilibrium(newtonian, nodes, 1e-9);
    expect(out, cap.invariants_ok, "sphere capacity invariants");
    double lo = kInf, hi = -kInf;
    for (double w : cap.theta) {
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    expect(out, hi - lo <= 1e-6, "sphere weights not uniform");
    capacities.push_back(cap.capacity);
  }
  if (capacities.size() == 3) {
    const double change = std::fabs(capacities[2] - capacities[1]) / capacities[1];
    expect(out, change < 0.02, "capacity convergence between refinements");
  }
  expect(out, seconds_since(t0) < 120.0, "criterion 6 runtime");
  return out;
}

// --- criterion 7 ------------------------------------------------------------

Outcome criterion_case_two_identity() {
  Outcome out;
  const auto t0 = Clock::now();
  Rng rng(611006);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int done = 0;
  while (done < 100) {
    InstanceOptions opt;
    opt.zero_field = true;
    const TestInstance base = random_custom_instance(rng, opt);
    const System sys(base.kernel, base.condenser);

    ScalarSignedMeasure sigma;
    const std::size_t universe = base.kernel.matrix().rows();
    for (std::size_t u = 0; u < universe; ++u)
      if (rng() % 2) sigma.atoms.push_back({{static_cast<double>(u)}, gauss(rng)});
    const ExternalField field = ExternalField::from_scalar_source(sigma);
    const FieldValues f = field_values(sys, field);
    const DiscreteVectorMeasure mu = random_feasible_measure(rng, sys, f);
    ++done;

    const double lhs = weighted_energy(sys, mu, f);
    const ScalarSignedMeasure image = r_map(base.condenser, mu);
    const ScalarSignedMeasure shifted = scalar_sum(image, field.sigma);
    const double rhs = scalar_energy(sys, shifted, shifted) -
                       scalar_energy(sys, field.sigma, field.sigma);
    expect(out, std::fabs(lhs - rhs) <= 1e-10 * (1.0 + std::fabs(lhs)),
           "case II identity");
  }
  expect(out, seconds_since(t0) < 10.0, "criterion 7 runtime");
  return out;
}

// --- criterion 8 ------------------------------------------------------------

Outcome criterion_scale() {
  Outcome out;

  // Two 10x20 grids, 200 nodes each, separated by distance 1.
  Condenser c;
  for (int plate = 0; plate < 2; ++plate) {
    Plate p;
    p.id = plate;
    p.sign = plate == 0 ? +1 : -1;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 20; ++j)
        p.nodes.push_back({0.1 * i, 0.1 * j, plate == 0 ? 0.0 : 1.0});
    p.g.assign(p.nodes.size(), 1.0);
    p.mass = 1.0;
    c.plates.push_back(std::move(p));
  }

  const auto t0 = Clock::now();
  const System sys(Kernel::riesz(2.0, 3), c);
  const FieldValues f = field_values(sys, ExternalField::zero(c));
  SolverConfig cfg;
  cfg.gap_tol_abs = 5e-9;
  cfg.gap_tol_rel = 0.0;
  const EquilibriumReport rep = solve(sys, f, cfg);
  const double dt = seconds_since(t0);

  expect(out, rep.gap <= 1e-8, "gap above 1e-8");
  expect(out, dt < 5.0, "400-node solve exceeded 5 s");
  char buf[96];
  std::snprintf(buf, sizeof buf, "gap %.2e, %.2f s, %ld iters", rep.gap, dt,
                rep.iters);
  if (out.detail.empty()) out.detail = buf;
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "closed-form instance suite", criterion_closed_forms},
      {2, "certificate soundness and completeness", criterion_certificates},
      {3, "scalar-image identities", criterion_r_map_identities},
      {4, "uniqueness battery", criterion_uniqueness},
      {5, "exhaustion continuity", criterion_exhaustion},
      {6, "capacity invariants and sphere refinement", criterion_capacity},
      {7, "scalar-source energy identity", criterion_case_two_identity},
      {8, "400-node scale check", criterion_scale},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double dt = seconds_since(t0);
    std::printf("criterion %d [%s]: %s (%.2f s)%s%s\n", c.id, c.label,
                out.pass ? "PASS" : "FAIL", dt, out.detail.empty() ? "" : " - ",
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures;
}
