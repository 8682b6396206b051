#pragma once

#include <vector>

#include "gvp/certify.hpp"
#include "gvp/solver.hpp"

namespace gvp {

struct ExhaustionStepRow {
  int step = 0;
  std::vector<std::size_t> subset_sizes;
  double value = 0.0;
  double gap = 0.0;
  std::vector<double> constants;
  double field_pairing = 0.0;
  double distance_to_final = 0.0;  // semimetric to the direct full solve
};

struct ExhaustionReport {
  std::vector<ExhaustionStepRow> steps;
  EquilibriumReport full;         // direct solve on the whole condenser
  bool monotone_ok = true;        // values nonincreasing along the chain
  bool converged = true;          // final step agrees with the full solve
  double final_distance = 0.0;
  double final_value_diff = 0.0;
  double final_constants_diff = 0.0;
  double final_pairing_diff = 0.0;
};

// Solves the restricted problem on every step of the schedule and compares
// the chain against the direct full solve. tol bounds the final-step
// agreement; monotone_tol (times a value scale) bounds the allowed uptick
// between consecutive steps.
ExhaustionReport run_exhaustion(const System& sys, const FieldValues& f,
                                const ExhaustionSchedule& schedule,
                                const SolverConfig& cfg, double tol,
                                double monotone_tol = 1e-9);

// Restriction of mu to the given per-plate node subsets, rescaled so every
// plate carries its prescribed mass again. The result lives on the original
// condenser with zeros off the subset.
DiscreteVectorMeasure renormalize_restriction(
    const Condenser& c, const DiscreteVectorMeasure& mu,
    const std::vector<std::vector<std::size_t>>& subset);

}  // namespace gvp
