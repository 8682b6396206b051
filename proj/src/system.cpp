#include "gvp/system.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <sstream>

#include "gvp/simd.hpp"

namespace gvp {

System::System(Kernel kernel, Condenser condenser)
    : kernel_(std::move(kernel)), condenser_(std::move(condenser)) {
  const ValidationResult v = validate_condenser(condenser_);
  if (!v.ok) {
    std::ostringstream msg;
    msg << "invalid condenser:";
    for (const auto& rec : v.violations)
      msg << ' ' << violation_name(rec.kind) << "(plate " << rec.plate << ")";
    fail(Errc::validation_error, msg.str());
  }
  build_tables();
  check_psd();
}

void System::build_tables() {
  offsets_.clear();
  points_.clear();
  sign_.clear();
  g_.clear();
  for (const Plate& p : condenser_.plates) {
    offsets_.push_back(points_.size());
    for (std::size_t n = 0; n < p.nodes.size(); ++n) {
      points_.push_back(p.nodes[n]);
      sign_.push_back(static_cast<double>(p.sign));
      g_.push_back(p.g[n]);
    }
  }

  if (kernel_.analytic() &&
      kernel_.diagonal().policy == DiagonalPolicy::effective_radius) {
    diag_distance_ = kernel_.diagonal().scale * min_spacing(points_);
  }
  gram_ = assemble_gram(kernel_, points_, points_, diag_distance_).values;
}

void System::check_psd() {
  const std::size_t n = gram_.rows();
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = gram_(i, j);

  // Cholesky first: success certifies strict positive definiteness cheaply.
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) {
    psd_.psd = true;
    psd_.strict = true;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  psd_.min_eigenvalue = es.eigenvalues().minCoeff();
  psd_.max_eigenvalue = es.eigenvalues().maxCoeff();
  const double scale = std::max(1.0, std::fabs(psd_.max_eigenvalue));
  psd_.psd = psd_.min_eigenvalue >= -1e-8 * scale;
  psd_.strict = psd_.min_eigenvalue > 1e-10 * scale;
}

void System::matvec(const double* x, double* out) const {
  const auto& ops = simd::active_ops();
  const std::size_t n = node_count();
  for (std::size_t i = 0; i < n; ++i) out[i] = ops.dot(gram_.row(i), x, n);
}

System System::restricted(const std::vector<std::vector<std::size_t>>& subsets) const {
  if (subsets.size() != plate_count())
    fail(Errc::condenser_mismatch, "subset list does not match plate count");

  System sub;
  sub.kernel_ = kernel_;
  sub.diag_distance_ = diag_distance_;

  std::vector<std::size_t> keep;  // stacked indices retained
  for (std::size_t i = 0; i < plate_count(); ++i) {
    const Plate& parent = condenser_.plates[i];
    Plate p;
    p.id = parent.id;
    p.sign = parent.sign;
    p.mass = parent.mass;
    if (subsets[i].empty())
      fail(Errc::empty_step, "restriction would empty a plate");
    for (std::size_t local : subsets[i]) {
      if (local >= parent.nodes.size())
        fail(Errc::condenser_mismatch, "subset index out of range");
      p.nodes.push_back(parent.nodes[local]);
      p.g.push_back(parent.g[local]);
      keep.push_back(offsets_[i] + local);
    }
    sub.condenser_.plates.push_back(std::move(p));
  }

  sub.offsets_.clear();
  sub.points_.clear();
  sub.sign_.clear();
  sub.g_.clear();
  for (const Plate& p : sub.condenser_.plates) {
    sub.offsets_.push_back(sub.points_.size());
    for (std::size_t n = 0; n < p.nodes.size(); ++n) {
      sub.points_.push_back(p.nodes[n]);
      sub.sign_.push_back(static_cast<double>(p.sign));
      sub.g_.push_back(p.g[n]);
    }
  }

  const std::size_t m = keep.size();
  sub.gram_ = Matrix(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) sub.gram_(i, j) = gram_(keep[i], keep[j]);
  sub.check_psd();
  return sub;
}

}  // namespace gvp
