#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gvp/types.hpp"

namespace gvp {

enum class KernelFamily { riesz, newtonian, log_unit_ball, custom };

enum class DiagonalPolicy { effective_radius, explicit_values, exclude };

// How the singular diagonal kappa(x, x) of an analytic kernel is replaced.
// effective_radius evaluates the kernel at a fraction of the smallest node
// spacing; explicit_values carries one value per declared node; exclude makes
// any coincident evaluation an error. A custom matrix kernel already stores
// finite diagonal entries and uses those directly.
struct DiagonalRule {
  DiagonalPolicy policy = DiagonalPolicy::effective_radius;
  double scale = 0.5;
  std::vector<std::pair<Point, double>> values;  // explicit_values only
};

class Kernel {
 public:
  static Kernel riesz(double alpha, int dim, DiagonalRule rule = {});
  static Kernel newtonian(int dim, DiagonalRule rule = {});
  static Kernel log_unit_ball(DiagonalRule rule = {});
  static Kernel custom(Matrix values, DiagonalRule rule = {});

  KernelFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  int dim() const { return dim_; }
  const Matrix& matrix() const { return matrix_; }
  const DiagonalRule& diagonal() const { return diagonal_; }

  bool analytic() const { return family_ != KernelFamily::custom; }

  // kappa at separation r > 0 (analytic families only).
  double value_at_distance(double r) const;

  // Diagonal value under the configured policy; diag_distance supplies the
  // resolved effective radius where the policy needs one.
  double diagonal_value(const Point& x, std::optional<double> diag_distance) const;

  // Generic pairwise evaluation with the diagonal rule applied on coincident
  // points. diag_distance is the context-resolved effective radius (empty for
  // a bare evaluation, in which case effective_radius diagonals are an error).
  double eval(const Point& x, const Point& y,
              std::optional<double> diag_distance = std::nullopt) const;

 private:
  Kernel() = default;
  void validate_point(const Point& p) const;

  KernelFamily family_ = KernelFamily::custom;
  double alpha_ = 0.0;
  int dim_ = 0;
  Matrix matrix_;
  DiagonalRule diagonal_;
};

struct GramBlock {
  int rows_id = 0;
  int cols_id = 0;
  Matrix values;
};

// Tabulates kappa over nodes_row x nodes_col. Coincident node pairs get the
// diagonal rule; for the effective_radius policy the radius is scale times
// the smallest spacing among nodes_row unless diag_distance overrides it.
GramBlock assemble_gram(const Kernel& k, const std::vector<Point>& nodes_row,
                        const std::vector<Point>& nodes_col,
                        std::optional<double> diag_distance = std::nullopt);

struct PsdCheck {
  bool psd = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

// Symmetric eigenvalue test: psd iff min_eig >= -tol * max(1, |max_eig|).
PsdCheck check_positive_definite(const GramBlock& g, double tol);

// Smallest positive spacing among the given points; error if none exists.
double min_spacing(const std::vector<Point>& nodes);

}  // namespace gvp
