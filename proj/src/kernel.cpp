#include "gvp/kernel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "gvp/simd.hpp"

namespace gvp {

Kernel Kernel::riesz(double alpha, int dim, DiagonalRule rule) {
  if (!(dim >= 1) || !(alpha > 0.0) || !(alpha < static_cast<double>(dim)))
    fail(Errc::domain_error, "riesz kernel requires 0 < alpha < dim");
  Kernel k;
  k.family_ = KernelFamily::riesz;
  k.alpha_ = alpha;
  k.dim_ = dim;
  k.diagonal_ = std::move(rule);
  return k;
}

Kernel Kernel::newtonian(int dim, DiagonalRule rule) {
  if (dim < 3) fail(Errc::domain_error, "newtonian kernel requires dim >= 3");
  Kernel k = riesz(2.0, dim, std::move(rule));
  k.family_ = KernelFamily::newtonian;
  return k;
}

Kernel Kernel::log_unit_ball(DiagonalRule rule) {
  Kernel k;
  k.family_ = KernelFamily::log_unit_ball;
  k.dim_ = 2;
  k.diagonal_ = std::move(rule);
  return k;
}

Kernel Kernel::custom(Matrix values, DiagonalRule rule) {
  if (values.rows() != values.cols() || values.rows() == 0)
    fail(Errc::domain_error, "custom kernel matrix must be square and nonempty");
  const double scale = std::max(1.0, values.max_abs());
  if (values.max_asymmetry() > 1e-12 * scale)
    fail(Errc::not_symmetric, "custom kernel matrix is not symmetric");
  Kernel k;
  k.family_ = KernelFamily::custom;
  k.matrix_ = std::move(values);
  k.diagonal_ = std::move(rule);
  return k;
}

void Kernel::validate_point(const Point& p) const {
  if (family_ == KernelFamily::custom) {
    if (p.size() != 1) fail(Errc::domain_error, "custom kernel node must be a single index");
    const double idx = p[0];
    if (idx != std::floor(idx) || idx < 0.0 ||
        idx >= static_cast<double>(matrix_.rows()))
      fail(Errc::domain_error, "custom kernel node index out of range");
    return;
  }
  if (static_cast<int>(p.size()) != dim_)
    fail(Errc::domain_error, "node dimension does not match kernel dimension");
  if (family_ == KernelFamily::log_unit_ball) {
    if (sq_distance(p, Point(p.size(), 0.0)) >= 1.0)
      fail(Errc::domain_error, "log kernel node outside the open unit ball");
  }
}

double Kernel::value_at_distance(double r) const {
  switch (family_) {
    case KernelFamily::riesz:
    case KernelFamily::newtonian:
      return std::pow(r, alpha_ - static_cast<double>(dim_));
    case KernelFamily::log_unit_ball:
      return -std::log(r);
    case KernelFamily::custom:
      fail(Errc::domain_error, "custom kernel has no distance profile");
  }
  return 0.0;
}

double Kernel::diagonal_value(const Point& x, std::optional<double> diag_distance) const {
  switch (diagonal_.policy) {
    case DiagonalPolicy::exclude:
      fail(Errc::coincident_nodes, "coincident nodes under the exclude-diagonal policy");
    case DiagonalPolicy::explicit_values: {
      for (const auto& [p, v] : diagonal_.values)
        if (same_point(p, x)) return v;
      fail(Errc::domain_error, "no explicit diagonal value declared for node");
    }
    case DiagonalPolicy::effective_radius: {
      if (family_ == KernelFamily::custom) {
        return matrix_(static_cast<std::size_t>(x[0]), static_cast<std::size_t>(x[0]));
      }
      if (!diag_distance)
        fail(Errc::unresolved_diagonal,
             "effective-radius diagonal needs a resolved node spacing");
      return value_at_distance(*diag_distance);
    }
  }
  fail(Errc::internal_error, "unknown diagonal policy");
}

double Kernel::eval(const Point& x, const Point& y,
                    std::optional<double> diag_distance) const {
  validate_point(x);
  validate_point(y);
  if (same_point(x, y)) return diagonal_value(x, diag_distance);
  if (family_ == KernelFamily::custom) {
    return matrix_(static_cast<std::size_t>(x[0]), static_cast<std::size_t>(y[0]));
  }
  return value_at_distance(distance(x, y));
}

double min_spacing(const std::vector<Point>& nodes) {
  double best = kInf;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const double d = distance(nodes[i], nodes[j]);
      if (d > 0.0) best = std::min(best, d);
    }
  if (!std::isfinite(best))
    fail(Errc::domain_error, "node set has no positive spacing to derive an effective radius");
  return best;
}

namespace {

// Fills one Gram row for an analytic kernel: squared distances via the SIMD
// sweep, then the exponent transform. Coordinates are laid out one array per
// dimension.
void analytic_row(const Kernel& k, const Point& x,
                  const std::vector<std::vector<double>>& coords, double* out,
                  std::size_t n) {
  const auto& ops = simd::active_ops();
  std::fill(out, out + n, 0.0);
  for (std::size_t d = 0; d < coords.size(); ++d)
    ops.sqdist_accum(x[d], coords[d].data(), out, n);

  if (k.family() == KernelFamily::log_unit_ball) {
    for (std::size_t j = 0; j < n; ++j)
      if (out[j] > 0.0) out[j] = -0.5 * std::log(out[j]);
    return;
  }
  const double p2 = 0.5 * (k.alpha() - static_cast<double>(k.dim()));
  if (p2 == -0.5) {
    ops.inv_sqrt(out, out, n);
  } else if (p2 == -1.0) {
    ops.reciprocal(out, out, n);
  } else if (p2 == 0.5) {
    ops.sqrt(out, out, n);
  } else {
    for (std::size_t j = 0; j < n; ++j)
      if (out[j] > 0.0) out[j] = std::pow(out[j], p2);
  }
}

}  // namespace

GramBlock assemble_gram(const Kernel& k, const std::vector<Point>& nodes_row,
                        const std::vector<Point>& nodes_col,
                        std::optional<double> diag_distance) {
  if (nodes_row.empty() || nodes_col.empty())
    fail(Errc::domain_error, "gram assembly needs nonempty node lists");

  GramBlock block;
  block.values = Matrix(nodes_row.size(), nodes_col.size());

  // Coincident pairs present?
  bool has_coincident = false;
  for (const auto& r : nodes_row) {
    for (const auto& c : nodes_col)
      if (same_point(r, c)) { has_coincident = true; break; }
    if (has_coincident) break;
  }

  std::optional<double> h = diag_distance;
  if (has_coincident && k.analytic() &&
      k.diagonal().policy == DiagonalPolicy::effective_radius && !h) {
    h = k.diagonal().scale * min_spacing(nodes_row);
  }

  if (!k.analytic()) {
    for (std::size_t i = 0; i < nodes_row.size(); ++i)
      for (std::size_t j = 0; j < nodes_col.size(); ++j)
        block.values(i, j) = k.eval(nodes_row[i], nodes_col[j], h);
    return block;
  }

  // SoA coordinates of the column nodes for the vectorized sweep.
  const std::size_t dim = nodes_col.front().size();
  std::vector<std::vector<double>> coords(dim, std::vector<double>(nodes_col.size()));
  for (std::size_t j = 0; j < nodes_col.size(); ++j) {
    if (nodes_col[j].size() != dim)
      fail(Errc::domain_error, "inconsistent node dimensions");
    for (std::size_t d = 0; d < dim; ++d) coords[d][j] = nodes_col[j][d];
  }

  for (std::size_t i = 0; i < nodes_row.size(); ++i) {
    const Point& x = nodes_row[i];
    if (x.size() != dim) fail(Errc::domain_error, "inconsistent node dimensions");
    k.eval(x, nodes_col[0], h);  // validates x (domain, dimension) once
    analytic_row(k, x, coords, block.values.row(i), nodes_col.size());
    // Patch coincident entries with the diagonal rule.
    for (std::size_t j = 0; j < nodes_col.size(); ++j)
      if (same_point(x, nodes_col[j]))
        block.values(i, j) = k.diagonal_value(x, h);
  }
  for (std::size_t i = 0; i < nodes_row.size(); ++i)
    for (std::size_t j = 0; j < nodes_col.size(); ++j)
      if (!std::isfinite(block.values(i, j)))
        fail(Errc::domain_error, "non-finite gram entry survived regularization");
  return block;
}

PsdCheck check_positive_definite(const GramBlock& g, double tol) {
  const Matrix& m = g.values;
  if (m.rows() != m.cols())
    fail(Errc::not_symmetric, "positive definiteness check needs a square block");
  const double scale = std::max(1.0, m.max_abs());
  if (m.max_asymmetry() > 1e-12 * scale)
    fail(Errc::not_symmetric, "gram block asymmetry above machine tolerance");

  Eigen::MatrixXd a(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  PsdCheck out;
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  out.max_eigenvalue = es.eigenvalues().maxCoeff();
  out.psd = out.min_eigenvalue >= -tol * std::max(1.0, std::fabs(out.max_eigenvalue));
  return out;
}

}  // namespace gvp
