#pragma once

#include <utility>
#include <vector>

#include "gvp/measure.hpp"
#include "gvp/system.hpp"

namespace gvp {

enum class StepRule { exact_line_search, harmonic };
enum class InitKind { uniform_feasible, vertex, given };

struct SolverConfig {
  long max_iters = 200000;
  double gap_tol_abs = 1e-9;
  double gap_tol_rel = 1e-9;
  StepRule step_rule = StepRule::exact_line_search;
  InitKind init = InitKind::uniform_feasible;
  std::vector<std::size_t> vertex_init;  // one node index per plate
  DiscreteVectorMeasure given_init;
  double support_threshold = 1e-8;
  // Swap steps between the worst supported node and the oracle node, taken
  // alongside plain vertex steps when they descend further. Plain vertex
  // steps alone stall at O(1/t) on boundary optima and cannot reach the gap
  // tolerances this tool certifies at.
  bool pairwise_steps = true;
  bool trace = false;
  std::size_t snapshot_stride = 0;  // keep iterate copies every k iterations
};

struct TracePoint {
  long iter = 0;
  double value = 0.0;
  double gap = 0.0;
  double feasibility_err = 0.0;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<int> infinite_plates;   // plates whose field is +inf everywhere
  std::vector<double> min_abs_field;  // per plate, min |f| over finite nodes
  MassSummabilityResult mass_summability;
};

struct LmoResult {
  std::size_t node = 0;      // local node index within the plate
  double objective = 0.0;    // a_i * W(x*) / g(x*)
};

struct EquilibriumReport {
  DiscreteVectorMeasure lambda;
  double value = 0.0;
  std::vector<double> constants;      // <W^i, lambda^i> per plate
  double gap = 0.0;
  long iters = 0;
  bool converged = false;             // false when max_iters ran out
  std::vector<double> feasibility;    // per plate |<g_i, lambda^i> - a_i|
  std::vector<TracePoint> trace;
  std::vector<std::pair<long, DiscreteVectorMeasure>> snapshots;
};

FeasibilityReport check_feasibility(const System& sys, const FieldValues& f);

LmoResult linear_minimization_oracle(const System& sys, const FieldValues& f,
                                     const DiscreteVectorMeasure& mu,
                                     std::size_t plate);

double duality_gap(const System& sys, const FieldValues& f,
                   const DiscreteVectorMeasure& mu);

DiscreteVectorMeasure initial_measure(const System& sys, const FieldValues& f,
                                      const SolverConfig& cfg);

EquilibriumReport solve(const System& sys, const FieldValues& f,
                        const SolverConfig& cfg);

// Weight below which a node does not count as support of plate i:
// threshold * a_i / (g_i(x) * plate node count).
double support_cutoff(const System& sys, double threshold, std::size_t plate,
                      std::size_t node);

}  // namespace gvp
