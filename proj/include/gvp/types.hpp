#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gvp {

// A node location. For analytic kernels this is a point in R^d; for custom
// matrix kernels it is a one-component vector holding the universe index.
using Point = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Errc {
  coincident_nodes,
  domain_error,
  not_symmetric,
  unresolved_diagonal,
  condenser_mismatch,
  negative_radicand,
  infeasible,
  all_infinite,
  empty_step,
  zero_restricted_mass,
  step_infeasible,
  degenerate_gram,
  parse_error,
  schema_error,
  validation_error,
  missing_data,
  io_error,
  internal_error,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::coincident_nodes: return "CoincidentNodes";
    case Errc::domain_error: return "DomainError";
    case Errc::not_symmetric: return "NotSymmetric";
    case Errc::unresolved_diagonal: return "UnresolvedDiagonal";
    case Errc::condenser_mismatch: return "CondenserMismatch";
    case Errc::negative_radicand: return "NegativeRadicand";
    case Errc::infeasible: return "Infeasible";
    case Errc::all_infinite: return "AllInfinite";
    case Errc::empty_step: return "EmptyStep";
    case Errc::zero_restricted_mass: return "ZeroRestrictedMass";
    case Errc::step_infeasible: return "StepInfeasible";
    case Errc::degenerate_gram: return "DegenerateGram";
    case Errc::parse_error: return "ParseError";
    case Errc::schema_error: return "SchemaError";
    case Errc::validation_error: return "ValidationError";
    case Errc::missing_data: return "MissingData";
    case Errc::io_error: return "IoError";
    case Errc::internal_error: return "InternalError";
  }
  return "UnknownError";
}

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), d_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return d_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

  double* row(std::size_t i) { return d_.data() + i * cols_; }
  const double* row(std::size_t i) const { return d_.data() + i * cols_; }

  double* data() { return d_.data(); }
  const double* data() const { return d_.data(); }

  // Largest absolute entry; 0 for an empty matrix.
  double max_abs() const {
    double m = 0.0;
    for (double v : d_) m = std::max(m, std::fabs(v));
    return m;
  }

  // Largest |a_ij - a_ji| over the square part.
  double max_asymmetry() const {
    double m = 0.0;
    const std::size_t n = std::min(rows_, cols_);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        m = std::max(m, std::fabs((*this)(i, j) - (*this)(j, i)));
    return m;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.d_ == b.d_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> d_;
};

inline double sq_distance(const Point& a, const Point& b) {
  double s = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  // Mismatched dimensions count the missing coordinates as zero; callers
  // validate dimensions before this ever matters.
  for (std::size_t k = n; k < a.size(); ++k) s += a[k] * a[k];
  for (std::size_t k = n; k < b.size(); ++k) s += b[k] * b[k];
  return s;
}

inline double distance(const Point& a, const Point& b) {
  return std::sqrt(sq_distance(a, b));
}

inline bool same_point(const Point& a, const Point& b) { return a == b; }

}  // namespace gvp
