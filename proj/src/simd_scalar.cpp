#include <cmath>

#include "gvp/simd.hpp"

namespace gvp::simd {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void sqdist_accum_scalar(double c, const double* x, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double d = c - x[i];
    acc[i] += d * d;
  }
}

void inv_sqrt_scalar(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / std::sqrt(in[i]);
}

void reciprocal_scalar(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / in[i];
}

void sqrt_scalar(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(in[i]);
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {dot_scalar,    axpy_scalar,       scal_scalar,
                          sqdist_accum_scalar, inv_sqrt_scalar, reciprocal_scalar,
                          sqrt_scalar,   "scalar"};
  return ops;
}

}  // namespace gvp::simd
