#pragma once

#include <optional>
#include <vector>

#include "gvp/condenser.hpp"
#include "gvp/kernel.hpp"
#include "gvp/types.hpp"

namespace gvp {

struct PsdInfo {
  bool psd = false;
  bool strict = false;
  double min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  double max_eigenvalue = std::numeric_limits<double>::quiet_NaN();
};

// A kernel/condenser pair assembled for evaluation: stacked node list, one
// resolved effective radius for the whole condenser, the full symmetric Gram
// table over all nodes (diagonal rule applied to every coincident pair), and
// a positive-definiteness record. Immutable after construction; all methods
// are safe for concurrent use.
//
// The shared effective radius (smallest positive spacing over the union of
// all condenser nodes, times the policy scale) makes energies of vector
// measures and of their scalar images agree exactly, which per-block radii
// would not.
class System {
 public:
  System(Kernel kernel, Condenser condenser);

  const Kernel& kernel() const { return kernel_; }
  const Condenser& condenser() const { return condenser_; }

  std::size_t plate_count() const { return condenser_.plates.size(); }
  std::size_t node_count() const { return points_.size(); }
  std::size_t offset(std::size_t plate) const { return offsets_[plate]; }
  std::size_t plate_size(std::size_t plate) const {
    return condenser_.plates[plate].nodes.size();
  }
  double sign(std::size_t plate) const {
    return static_cast<double>(condenser_.plates[plate].sign);
  }
  double node_sign(std::size_t stacked) const { return sign_[stacked]; }
  double g(std::size_t stacked) const { return g_[stacked]; }
  const std::vector<double>& g_stacked() const { return g_; }
  const Point& point(std::size_t stacked) const { return points_[stacked]; }
  const Matrix& gram() const { return gram_; }
  std::optional<double> diag_distance() const { return diag_distance_; }
  const PsdInfo& psd() const { return psd_; }

  // Pairwise kernel value with this system's diagonal resolution.
  double kernel_pair(const Point& a, const Point& b) const {
    return kernel_.eval(a, b, diag_distance_);
  }

  // out = gram * x over the stacked index.
  void matvec(const double* x, double* out) const;

  // Restriction to per-plate node subsets (sorted local indices). Keeps the
  // kernel, the resolved effective radius and the plate masses; the Gram is
  // the principal submatrix, so energies agree with the parent system.
  System restricted(const std::vector<std::vector<std::size_t>>& subsets) const;

 private:
  System() = default;
  void build_tables();
  void check_psd();

  Kernel kernel_{Kernel::custom(Matrix(1, 1, 1.0))};
  Condenser condenser_;
  std::vector<std::size_t> offsets_;
  std::vector<Point> points_;
  std::vector<double> sign_;
  std::vector<double> g_;
  Matrix gram_;
  std::optional<double> diag_distance_;
  PsdInfo psd_;
};

}  // namespace gvp
