// AVX2/FMA variants of the data-parallel primitives. This translation unit
// is compiled with -mavx2 -mfma and must only be entered after the runtime
// CPU check in simd_dispatch.cpp.

#include <immintrin.h>

#include <cmath>

#include "gvp/simd.hpp"

namespace gvp::simd {
namespace {

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal_avx2(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void sqdist_accum_avx2(double c, const double* x, double* acc, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(vc, _mm256_loadu_pd(x + i));
    __m256d va = _mm256_loadu_pd(acc + i);
    va = _mm256_fmadd_pd(d, d, va);
    _mm256_storeu_pd(acc + i, va);
  }
  // Fused tail keeps every entry's arithmetic identical to the vector body;
  // gram symmetry depends on values not varying with lane position.
  for (; i < n; ++i) {
    const double d = c - x[i];
    acc[i] = std::fma(d, d, acc[i]);
  }
}

void inv_sqrt_avx2(const double* in, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_div_pd(one, _mm256_sqrt_pd(_mm256_loadu_pd(in + i))));
  }
  for (; i < n; ++i) out[i] = 1.0 / std::sqrt(in[i]);
}

void reciprocal_avx2(const double* in, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_div_pd(one, _mm256_loadu_pd(in + i)));
  }
  for (; i < n; ++i) out[i] = 1.0 / in[i];
}

void sqrt_avx2(const double* in, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_loadu_pd(in + i)));
  }
  for (; i < n; ++i) out[i] = std::sqrt(in[i]);
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops = {dot_avx2,         axpy_avx2,     scal_avx2,
                          sqdist_accum_avx2, inv_sqrt_avx2, reciprocal_avx2,
                          sqrt_avx2,        "avx2"};
  return ops;
}

}  // namespace gvp::simd
