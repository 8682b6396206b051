#include "gvp/condenser.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gvp {

const char* violation_name(Violation v) {
  switch (v) {
    case Violation::shared_node_across_signs: return "SharedNodeAcrossSigns";
    case Violation::zero_separation: return "ZeroSeparation";
    case Violation::non_positive_g: return "NonPositiveG";
    case Violation::non_positive_mass: return "NonPositiveMass";
    case Violation::duplicate_node: return "DuplicateNode";
    case Violation::bad_sign: return "BadSign";
    case Violation::bad_plate_id: return "BadPlateId";
    case Violation::size_mismatch: return "SizeMismatch";
    case Violation::empty_plate: return "EmptyPlate";
  }
  return "UnknownViolation";
}

double Condenser::separation() const {
  double best = kInf;
  for (const auto& p : plates) {
    if (p.sign <= 0) continue;
    for (const auto& q : plates) {
      if (q.sign > 0) continue;
      for (const auto& x : p.nodes)
        for (const auto& y : q.nodes) best = std::min(best, distance(x, y));
    }
  }
  return best;
}

std::vector<Point> Condenser::all_nodes() const {
  std::vector<Point> out;
  for (const auto& p : plates) out.insert(out.end(), p.nodes.begin(), p.nodes.end());
  return out;
}

ValidationResult validate_condenser(const Condenser& c) {
  ValidationResult r;
  auto flag = [&r](Violation v, int plate, int node, std::string detail) {
    r.ok = false;
    r.violations.push_back({v, plate, node, std::move(detail)});
  };

  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    const Plate& p = c.plates[i];
    const int pi = static_cast<int>(i);
    if (p.id != pi)
      flag(Violation::bad_plate_id, pi, -1, "plate ids must be contiguous from 0");
    if (p.sign != 1 && p.sign != -1)
      flag(Violation::bad_sign, pi, -1, "plate sign must be +1 or -1");
    if (p.nodes.empty()) flag(Violation::empty_plate, pi, -1, "plate has no nodes");
    if (p.g.size() != p.nodes.size())
      flag(Violation::size_mismatch, pi, -1, "g length does not match node count");
    if (!(p.mass > 0.0))
      flag(Violation::non_positive_mass, pi, -1, "plate mass must be positive");
    for (std::size_t n = 0; n < p.g.size(); ++n)
      if (!(p.g[n] > 0.0))
        flag(Violation::non_positive_g, pi, static_cast<int>(n), "g value must be positive");
    for (std::size_t a = 0; a < p.nodes.size(); ++a)
      for (std::size_t b = a + 1; b < p.nodes.size(); ++b)
        if (same_point(p.nodes[a], p.nodes[b]))
          flag(Violation::duplicate_node, pi, static_cast<int>(b),
               "plate nodes must be pairwise distinct");
  }

  // Disjointness of oppositely signed plates.
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    for (std::size_t j = i + 1; j < c.plates.size(); ++j) {
      if (c.plates[i].sign == c.plates[j].sign) continue;
      for (std::size_t a = 0; a < c.plates[i].nodes.size(); ++a)
        for (const auto& y : c.plates[j].nodes)
          if (same_point(c.plates[i].nodes[a], y))
            flag(Violation::shared_node_across_signs, static_cast<int>(i),
                 static_cast<int>(a), "oppositely signed plates share a node");
    }
  }
  if (c.has_negative()) {
    const double sep = c.separation();
    if (!(sep > 0.0))
      flag(Violation::zero_separation, -1, -1, "positive and negative plates touch");
  }
  return r;
}

CrossSupResult check_cross_sup(const Condenser& c, const Kernel& k) {
  CrossSupResult out;
  out.has_negative = c.has_negative();
  if (!out.has_negative) return out;  // sup_cross stays at the -inf sentinel
  for (const auto& p : c.plates) {
    if (p.sign <= 0) continue;
    for (const auto& q : c.plates) {
      if (q.sign > 0) continue;
      for (const auto& x : p.nodes)
        for (const auto& y : q.nodes)
          out.sup_cross = std::max(out.sup_cross, k.eval(x, y));
    }
  }
  out.finite = std::isfinite(out.sup_cross);
  return out;
}

MassSummabilityResult check_mass_summability(const Condenser& c) {
  MassSummabilityResult out;
  out.per_plate.reserve(c.plates.size());
  for (const auto& p : c.plates) {
    const double g_inf = *std::min_element(p.g.begin(), p.g.end());
    if (g_inf < 1e-8) out.degenerate_scale = true;
    out.per_plate.push_back(p.mass / g_inf);
    out.sum += out.per_plate.back();
  }
  return out;
}

ExhaustionSchedule make_exhaustion(const Condenser& c, int num_steps,
                                   ExhaustionOrder order) {
  if (num_steps < 1) fail(Errc::domain_error, "exhaustion needs num_steps >= 1");
  ExhaustionSchedule s;
  s.steps.assign(num_steps, {});

  for (const Plate& p : c.plates) {
    const std::size_t n = p.nodes.size();
    if (n == 0) fail(Errc::empty_step, "plate with no nodes cannot be exhausted");

    std::vector<std::size_t> order_idx(n);
    std::iota(order_idx.begin(), order_idx.end(), 0);
    if (order == ExhaustionOrder::by_distance_from_centroid) {
      const std::size_t dim = p.nodes.front().size();
      Point centroid(dim, 0.0);
      for (const auto& x : p.nodes)
        for (std::size_t d = 0; d < dim; ++d) centroid[d] += x[d] / static_cast<double>(n);
      std::stable_sort(order_idx.begin(), order_idx.end(),
                       [&](std::size_t a, std::size_t b) {
                         return sq_distance(p.nodes[a], centroid) <
                                sq_distance(p.nodes[b], centroid);
                       });
    }

    for (int m = 1; m <= num_steps; ++m) {
      const std::size_t count = std::max<std::size_t>(
          1, static_cast<std::size_t>(
                 std::ceil(static_cast<double>(n) * m / num_steps)));
      std::vector<std::size_t> subset(order_idx.begin(),
                                      order_idx.begin() + std::min(count, n));
      std::sort(subset.begin(), subset.end());
      s.steps[m - 1].push_back(std::move(subset));
    }
  }
  return s;
}

}  // namespace gvp
