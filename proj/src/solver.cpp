#include "gvp/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gvp/simd.hpp"

namespace gvp {

namespace {

std::vector<double> stack_field(const System& sys, const FieldValues& f) {
  std::vector<double> out;
  out.reserve(sys.node_count());
  for (const auto& plate : f) out.insert(out.end(), plate.begin(), plate.end());
  return out;
}

}  // namespace

FeasibilityReport check_feasibility(const System& sys, const FieldValues& f) {
  FeasibilityReport r;
  r.mass_summability = check_mass_summability(sys.condenser());
  for (std::size_t i = 0; i < sys.plate_count(); ++i) {
    double min_abs = kInf;
    bool any_finite = false;
    for (double v : f[i]) {
      if (v == kInf) continue;
      any_finite = true;
      min_abs = std::min(min_abs, std::fabs(v));
    }
    r.min_abs_field.push_back(any_finite ? min_abs : kInf);
    if (!any_finite) {
      r.feasible = false;
      r.infinite_plates.push_back(static_cast<int>(i));
    }
  }
  return r;
}

LmoResult linear_minimization_oracle(const System& sys, const FieldValues& f,
                                     const DiscreteVectorMeasure& mu,
                                     std::size_t plate) {
  const Condenser& c = sys.condenser();
  const Plate& p = c.plates[plate];
  bool found = false;
  LmoResult best;
  double best_ratio = kInf;
  for (std::size_t n = 0; n < p.nodes.size(); ++n) {
    if (f[plate][n] == kInf) continue;
    const double w = weighted_potential(sys, mu, f, plate, n);
    const double ratio = w / p.g[n];
    if (!found || ratio < best_ratio) {
      found = true;
      best_ratio = ratio;
      best.node = n;
    }
  }
  if (!found)
    fail(Errc::all_infinite, "weighted potential is +inf on the whole plate");
  best.objective = p.mass * best_ratio;
  return best;
}

double duality_gap(const System& sys, const FieldValues& f,
                   const DiscreteVectorMeasure& mu) {
  const std::vector<double> w = stack_weights(sys, mu);
  const std::vector<double> fs = stack_field(sys, f);
  std::vector<double> pot = weighted_potentials(sys, mu, f);
  double gap = 0.0;
  for (std::size_t i = 0; i < sys.plate_count(); ++i) {
    const Plate& p = sys.condenser().plates[i];
    const std::size_t off = sys.offset(i);
    double pairing = 0.0;
    double best_ratio = kInf;
    for (std::size_t n = 0; n < p.nodes.size(); ++n) {
      const std::size_t s = off + n;
      if (w[s] != 0.0) {
        if (pot[s] == kInf) return kInf;
        pairing += w[s] * pot[s];
      }
      if (fs[s] == kInf) continue;
      best_ratio = std::min(best_ratio, pot[s] / p.g[n]);
    }
    if (!std::isfinite(best_ratio))
      fail(Errc::all_infinite, "weighted potential is +inf on the whole plate");
    gap += pairing - p.mass * best_ratio;
  }
  return gap;
}

DiscreteVectorMeasure initial_measure(const System& sys, const FieldValues& f,
                                      const SolverConfig& cfg) {
  const Condenser& c = sys.condenser();
  DiscreteVectorMeasure mu = zero_measure(c);
  switch (cfg.init) {
    case InitKind::uniform_feasible: {
      for (std::size_t i = 0; i < c.plates.size(); ++i) {
        const Plate& p = c.plates[i];
        double g_total = 0.0;
        for (std::size_t n = 0; n < p.nodes.size(); ++n)
          if (f[i][n] != kInf) g_total += p.g[n];
        if (g_total <= 0.0)
          fail(Errc::infeasible, "plate has no finite-field node to start from");
        for (std::size_t n = 0; n < p.nodes.size(); ++n)
          if (f[i][n] != kInf) mu.weights[i][n] = p.mass / g_total;
      }
      return mu;
    }
    case InitKind::vertex: {
      if (cfg.vertex_init.size() != c.plates.size())
        fail(Errc::infeasible, "vertex init needs one node index per plate");
      for (std::size_t i = 0; i < c.plates.size(); ++i) {
        const Plate& p = c.plates[i];
        const std::size_t n = cfg.vertex_init[i];
        if (n >= p.nodes.size())
          fail(Errc::infeasible, "vertex init index out of range");
        if (f[i][n] == kInf)
          fail(Errc::infeasible, "vertex init sits on an infinite-field node");
        mu.weights[i][n] = p.mass / p.g[n];
      }
      return mu;
    }
    case InitKind::given: {
      require_compatible(sys, cfg.given_init);
      mu = cfg.given_init;
      for (std::size_t i = 0; i < c.plates.size(); ++i) {
        const Plate& p = c.plates[i];
        for (std::size_t n = 0; n < p.nodes.size(); ++n)
          if (mu.weights[i][n] > 0.0 && f[i][n] == kInf)
            fail(Errc::infeasible, "given init puts weight on an infinite-field node");
        const double m = g_mass(c, mu, i);
        if (!(m > 0.0))
          fail(Errc::infeasible, "given init has zero g-mass on a plate");
        for (double& w : mu.weights[i]) w *= p.mass / m;
      }
      return mu;
    }
  }
  fail(Errc::internal_error, "unknown init kind");
}

double support_cutoff(const System& sys, double threshold, std::size_t plate,
                      std::size_t node) {
  const Plate& p = sys.condenser().plates[plate];
  return threshold * p.mass /
         (p.g[node] * static_cast<double>(p.nodes.size()));
}

namespace {

// Mutable stacked solver state with an incrementally maintained potential.
struct SolveState {
  const System& sys;
  std::vector<double> fs;       // stacked field values (+inf = masked)
  std::vector<double> w;        // stacked weights
  std::vector<double> u;        // sign .* w
  std::vector<double> pot;      // gram * u
  double pairing = 0.0;         // <f, mu> over unmasked nodes

  explicit SolveState(const System& s, const FieldValues& f,
                      const DiscreteVectorMeasure& mu0)
      : sys(s), fs(stack_field(s, f)) {
    w = stack_weights(s, mu0);
    refresh();
  }

  double weighted_pot(std::size_t p) const {
    return sys.node_sign(p) * pot[p] + fs[p];
  }

  double energy() const {
    return simd::active_ops().dot(u.data(), pot.data(), u.size());
  }

  double value() const { return energy() + 2.0 * pairing; }

  void recompute_pairing() {
    pairing = 0.0;
    for (std::size_t p = 0; p < w.size(); ++p)
      if (w[p] != 0.0) pairing += w[p] * fs[p];
  }

  // Exact per-plate renormalization plus a full potential rebuild.
  void refresh() {
    const Condenser& c = sys.condenser();
    for (std::size_t i = 0; i < sys.plate_count(); ++i) {
      const Plate& pl = c.plates[i];
      const std::size_t off = sys.offset(i);
      double m = 0.0;
      for (std::size_t n = 0; n < pl.nodes.size(); ++n) {
        if (w[off + n] < 0.0) w[off + n] = 0.0;
        m += pl.g[n] * w[off + n];
      }
      if (m > 0.0 && m != pl.mass) {
        const double s = pl.mass / m;
        for (std::size_t n = 0; n < pl.nodes.size(); ++n) w[off + n] *= s;
      }
    }
    u.assign(w.size(), 0.0);
    for (std::size_t p = 0; p < w.size(); ++p) u[p] = sys.node_sign(p) * w[p];
    pot.assign(w.size(), 0.0);
    sys.matvec(u.data(), pot.data());
    recompute_pairing();
  }

  double feasibility_err() const {
    const Condenser& c = sys.condenser();
    double worst = 0.0;
    for (std::size_t i = 0; i < sys.plate_count(); ++i) {
      const Plate& pl = c.plates[i];
      const std::size_t off = sys.offset(i);
      double m = 0.0;
      for (std::size_t n = 0; n < pl.nodes.size(); ++n) m += pl.g[n] * w[off + n];
      worst = std::max(worst, std::fabs(m - pl.mass));
    }
    return worst;
  }
};

struct PlateScan {
  std::size_t best = 0;        // oracle node (stacked index)
  double best_ratio = kInf;    // W/g there
  std::size_t away = 0;        // worst supported node (stacked index)
  double away_ratio = -kInf;
  bool has_away = false;
  double pairing = 0.0;        // <W^i, mu^i>
};

// Equality-constrained minimization restricted to the current support, with
// nonnegativity enforced by dropping offending nodes (primal active set).
// Jumps the state to the restricted minimizer when that strictly descends.
bool try_support_polish(SolveState& st) {
  const System& sys = st.sys;
  const Condenser& c = sys.condenser();
  const std::size_t nplates = sys.plate_count();

  std::vector<std::vector<std::size_t>> support(nplates);
  for (std::size_t i = 0; i < nplates; ++i) {
    const std::size_t off = sys.offset(i);
    for (std::size_t n = 0; n < sys.plate_size(i); ++n)
      if (st.w[off + n] > 0.0) support[i].push_back(off + n);
    if (support[i].empty()) return false;
  }

  const double current = st.value();
  for (int round = 0; round < 64; ++round) {
    std::vector<std::size_t> idx;
    std::vector<std::size_t> plate_of;
    for (std::size_t i = 0; i < nplates; ++i)
      for (std::size_t p : support[i]) {
        idx.push_back(p);
        plate_of.push_back(i);
      }
    const std::size_t m = idx.size();
    const std::size_t dim = m + nplates;

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = 0; q < m; ++q)
        kkt(p, q) = 2.0 * sys.node_sign(idx[p]) * sys.node_sign(idx[q]) *
                    sys.gram()(idx[p], idx[q]);
      kkt(p, m + plate_of[p]) = -sys.g(idx[p]);
      kkt(m + plate_of[p], p) = sys.g(idx[p]);
      rhs(p) = -2.0 * st.fs[idx[p]];
    }
    for (std::size_t i = 0; i < nplates; ++i)
      rhs(m + i) = c.plates[i].mass;

    const Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);
    if (!sol.allFinite() ||
        (kkt * sol - rhs).norm() > 1e-9 * std::max(1.0, rhs.norm()))
      return false;

    // Most negative weight decides whether to accept or shrink the support.
    std::size_t worst = m;
    double worst_w = -1e-13;
    for (std::size_t p = 0; p < m; ++p)
      if (sol(p) < worst_w) {
        worst_w = sol(p);
        worst = p;
      }
    if (worst == m) {
      double energy = 0.0, pairing = 0.0;
      for (std::size_t p = 0; p < m; ++p) {
        const double wp = std::max(0.0, sol(p));
        pairing += wp * st.fs[idx[p]];
        for (std::size_t q = 0; q < m; ++q)
          energy += wp * std::max(0.0, sol(q)) * sys.node_sign(idx[p]) *
                    sys.node_sign(idx[q]) * sys.gram()(idx[p], idx[q]);
      }
      const double candidate = energy + 2.0 * pairing;
      if (candidate >= current) return false;
      std::fill(st.w.begin(), st.w.end(), 0.0);
      for (std::size_t p = 0; p < m; ++p) st.w[idx[p]] = std::max(0.0, sol(p));
      st.refresh();
      return true;
    }
    auto& plate_support = support[plate_of[worst]];
    if (plate_support.size() <= 1) return false;
    plate_support.erase(
        std::find(plate_support.begin(), plate_support.end(), idx[worst]));
  }
  return false;
}

}  // namespace

EquilibriumReport solve(const System& sys, const FieldValues& f,
                        const SolverConfig& cfg) {
  if (!sys.psd().psd)
    fail(Errc::degenerate_gram,
         "gram matrix is not positive semidefinite; refusing to solve");
  {
    const FeasibilityReport feas = check_feasibility(sys, f);
    if (!feas.feasible) {
      std::ostringstream msg;
      msg << "FieldInfiniteOnPlate:";
      for (int i : feas.infinite_plates) msg << ' ' << i;
      fail(Errc::infeasible, msg.str());
    }
  }

  const auto& ops = simd::active_ops();
  const Condenser& c = sys.condenser();
  const std::size_t nplates = sys.plate_count();
  const std::size_t N = sys.node_count();

  SolveState st(sys, f, initial_measure(sys, f, cfg));

  std::vector<PlateScan> scan(nplates);
  std::vector<double> pot_vertex(N);
  std::vector<double> u_vertex(N);

  EquilibriumReport rep;
  long t = 0;
  long last_polish = -1;
  constexpr long kRefreshEvery = 256;
  constexpr long kPolishEvery = 24;

  for (; t < cfg.max_iters; ++t) {
    // Scan plates: oracle node, worst supported node, potential pairing.
    double gap = 0.0;
    for (std::size_t i = 0; i < nplates; ++i) {
      const Plate& pl = c.plates[i];
      const std::size_t off = sys.offset(i);
      PlateScan& s = scan[i];
      s = PlateScan{};
      for (std::size_t n = 0; n < pl.nodes.size(); ++n) {
        const std::size_t p = off + n;
        if (st.fs[p] == kInf) continue;  // masked; never carries weight
        const double wp = st.weighted_pot(p);
        const double ratio = wp / pl.g[n];
        if (ratio < s.best_ratio) {
          s.best_ratio = ratio;
          s.best = p;
        }
        if (st.w[p] > 0.0) {
          s.pairing += st.w[p] * wp;
          if (!s.has_away || ratio > s.away_ratio) {
            s.has_away = true;
            s.away_ratio = ratio;
            s.away = p;
          }
        }
      }
      if (!std::isfinite(s.best_ratio))
        fail(Errc::all_infinite, "weighted potential is +inf on the whole plate");
      gap += s.pairing - pl.mass * s.best_ratio;
    }

    const double value = st.value();
    if (cfg.trace) rep.trace.push_back({t, value, gap, st.feasibility_err()});
    if (cfg.snapshot_stride > 0 && t % cfg.snapshot_stride == 0)
      rep.snapshots.emplace_back(t, unstack_weights(sys, st.w));

    if (gap <= cfg.gap_tol_abs + cfg.gap_tol_rel * std::fabs(value)) {
      rep.converged = true;
      break;
    }

    if (cfg.step_rule == StepRule::harmonic) {
      const double gamma = 2.0 / static_cast<double>(t + 2);
      std::fill(u_vertex.begin(), u_vertex.end(), 0.0);
      for (std::size_t i = 0; i < nplates; ++i) {
        const std::size_t p = scan[i].best;
        u_vertex[p] = sys.node_sign(p) * c.plates[i].mass / sys.g(p);
      }
      std::fill(pot_vertex.begin(), pot_vertex.end(), 0.0);
      for (std::size_t i = 0; i < nplates; ++i) {
        const std::size_t p = scan[i].best;
        ops.axpy(u_vertex[p], sys.gram().row(p), pot_vertex.data(), N);
      }
      ops.scal(1.0 - gamma, st.w.data(), N);
      ops.scal(1.0 - gamma, st.u.data(), N);
      for (std::size_t i = 0; i < nplates; ++i) {
        const std::size_t p = scan[i].best;
        st.w[p] += gamma * c.plates[i].mass / sys.g(p);
        st.u[p] += gamma * u_vertex[p];
      }
      ops.scal(1.0 - gamma, st.pot.data(), N);
      ops.axpy(gamma, pot_vertex.data(), st.pot.data(), N);
      st.recompute_pairing();
      if ((t + 1) % kRefreshEvery == 0) st.refresh();
      continue;
    }

    // --- exact line search: joint vertex step vs best single-plate swap ---

    std::fill(u_vertex.begin(), u_vertex.end(), 0.0);
    for (std::size_t i = 0; i < nplates; ++i) {
      const std::size_t p = scan[i].best;
      u_vertex[p] = sys.node_sign(p) * c.plates[i].mass / sys.g(p);
    }
    std::fill(pot_vertex.begin(), pot_vertex.end(), 0.0);
    for (std::size_t i = 0; i < nplates; ++i) {
      const std::size_t p = scan[i].best;
      ops.axpy(u_vertex[p], sys.gram().row(p), pot_vertex.data(), N);
    }
    double curv_fw = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      curv_fw += (u_vertex[p] - st.u[p]) * (pot_vertex[p] - st.pot[p]);
    double gamma_fw;
    if (curv_fw > 0.0)
      gamma_fw = std::clamp(gap / curv_fw, 0.0, 1.0);
    else
      gamma_fw = gap > 0.0 ? 1.0 : 0.0;
    const double descent_fw = 2.0 * gap * gamma_fw - curv_fw * gamma_fw * gamma_fw;

    // Swap candidate: move the worst supported node's mass toward the
    // oracle node, one plate at a time, picked by achievable descent.
    std::size_t sw_plate = nplates;
    double sw_gamma = 0.0, sw_descent = 0.0;
    if (cfg.pairwise_steps) {
      for (std::size_t i = 0; i < nplates; ++i) {
        const PlateScan& s = scan[i];
        if (!s.has_away || s.away == s.best) continue;
        const double wa = st.w[s.away];
        const double drop = wa * sys.g(s.away) * (s.away_ratio - s.best_ratio);
        if (drop <= 0.0) continue;
        const double dua = -sys.node_sign(s.away) * wa;
        const double dub = sys.node_sign(s.best) * wa * sys.g(s.away) / sys.g(s.best);
        const double curv = dua * dua * sys.gram()(s.away, s.away) +
                            2.0 * dua * dub * sys.gram()(s.away, s.best) +
                            dub * dub * sys.gram()(s.best, s.best);
        double gamma;
        if (curv > 0.0)
          gamma = std::clamp(drop / curv, 0.0, 1.0);
        else
          gamma = 1.0;
        const double descent = 2.0 * drop * gamma - curv * gamma * gamma;
        if (descent > sw_descent) {
          sw_descent = descent;
          sw_gamma = gamma;
          sw_plate = i;
        }
      }
    }

    const bool take_swap = sw_descent > descent_fw && sw_plate < nplates;
    if (!take_swap && gamma_fw <= 0.0) break;  // no usable direction left

    if (take_swap) {
      const PlateScan& s = scan[sw_plate];
      const double wa = st.w[s.away];
      const double dwa = sw_gamma * wa;
      const double dwb = dwa * sys.g(s.away) / sys.g(s.best);
      st.w[s.away] = sw_gamma == 1.0 ? 0.0 : st.w[s.away] - dwa;
      st.w[s.best] += dwb;
      const double dua = -sys.node_sign(s.away) * dwa;
      const double dub = sys.node_sign(s.best) * dwb;
      st.u[s.away] = sys.node_sign(s.away) * st.w[s.away];
      st.u[s.best] += dub;
      ops.axpy(dua, sys.gram().row(s.away), st.pot.data(), N);
      ops.axpy(dub, sys.gram().row(s.best), st.pot.data(), N);
      st.pairing += -dwa * st.fs[s.away] + dwb * st.fs[s.best];
    } else {
      ops.scal(1.0 - gamma_fw, st.w.data(), N);
      ops.scal(1.0 - gamma_fw, st.u.data(), N);
      for (std::size_t i = 0; i < nplates; ++i) {
        const std::size_t p = scan[i].best;
        st.w[p] += gamma_fw * c.plates[i].mass / sys.g(p);
        st.u[p] += gamma_fw * u_vertex[p];
      }
      ops.scal(1.0 - gamma_fw, st.pot.data(), N);
      ops.axpy(gamma_fw, pot_vertex.data(), st.pot.data(), N);
      st.recompute_pairing();
    }

    // Once the support has roughly settled, jump to the exact minimizer on
    // it; the vertex steps keep extending the support if a node is missing.
    const bool polish_due = gap <= 1e-2 * std::max(1.0, std::fabs(value)) &&
                            (t - last_polish) >= kPolishEvery;
    if (polish_due) {
      last_polish = t;
      try_support_polish(st);
    } else if ((t + 1) % kRefreshEvery == 0) {
      st.refresh();
    }
  }

  // Final report from a fresh rebuild.
  st.refresh();
  rep.lambda = unstack_weights(sys, st.w);
  rep.value = st.value();
  rep.gap = duality_gap(sys, f, rep.lambda);
  rep.iters = t;
  if (!rep.converged)
    rep.converged =
        rep.gap <= cfg.gap_tol_abs + cfg.gap_tol_rel * std::fabs(rep.value);
  rep.constants.assign(nplates, 0.0);
  rep.feasibility.assign(nplates, 0.0);
  for (std::size_t i = 0; i < nplates; ++i) {
    const Plate& pl = c.plates[i];
    const std::size_t off = sys.offset(i);
    double ci = 0.0;
    for (std::size_t n = 0; n < pl.nodes.size(); ++n) {
      const std::size_t p = off + n;
      if (st.w[p] != 0.0) ci += st.w[p] * st.weighted_pot(p);
    }
    rep.constants[i] = ci;
    rep.feasibility[i] = std::fabs(g_mass(c, rep.lambda, i) - pl.mass);
  }
  return rep;
}

}  // namespace gvp
