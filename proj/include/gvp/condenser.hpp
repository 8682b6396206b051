#pragma once

#include <string>
#include <vector>

#include "gvp/kernel.hpp"
#include "gvp/types.hpp"

namespace gvp {

// One plate: a finite node set with sign, positive node weights g and a
// prescribed g-mass.
struct Plate {
  int id = 0;
  int sign = +1;
  std::vector<Point> nodes;
  std::vector<double> g;
  double mass = 1.0;
};

struct Condenser {
  std::vector<Plate> plates;

  std::size_t plate_count() const { return plates.size(); }
  bool has_negative() const {
    for (const auto& p : plates)
      if (p.sign < 0) return true;
    return false;
  }
  // Smallest distance between a positive-plate node and a negative-plate
  // node; +inf when either sign class is empty.
  double separation() const;
  // All node points of all plates, in plate order.
  std::vector<Point> all_nodes() const;
};

enum class Violation {
  shared_node_across_signs,
  zero_separation,
  non_positive_g,
  non_positive_mass,
  duplicate_node,
  bad_sign,
  bad_plate_id,
  size_mismatch,
  empty_plate,
};

struct ViolationRecord {
  Violation kind;
  int plate = -1;
  int node = -1;
  std::string detail;
};

const char* violation_name(Violation v);

struct ValidationResult {
  bool ok = true;
  std::vector<ViolationRecord> violations;
};

ValidationResult validate_condenser(const Condenser& c);

struct CrossSupResult {
  double sup_cross = -kInf;  // -inf sentinel when there are no negative plates
  bool finite = true;
  bool has_negative = false;
};

// Largest kernel value over (positive node, negative node) pairs.
CrossSupResult check_cross_sup(const Condenser& c, const Kernel& k);

struct MassSummabilityResult {
  double sum = 0.0;
  std::vector<double> per_plate;  // a_i / min_x g_i(x)
  bool degenerate_scale = false;  // some g_inf below 1e-8
};

MassSummabilityResult check_mass_summability(const Condenser& c);

enum class ExhaustionOrder { by_distance_from_centroid, by_index };

// steps[m][plate] = sorted node indices; nested and increasing, the last
// step holding every node.
struct ExhaustionSchedule {
  std::vector<std::vector<std::vector<std::size_t>>> steps;
};

// Step m of an n-node plate holds ceil(n * m / num_steps) nodes (at least 1).
ExhaustionSchedule make_exhaustion(const Condenser& c, int num_steps,
                                   ExhaustionOrder order);

}  // namespace gvp
