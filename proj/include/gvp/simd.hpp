#pragma once

#include <cstddef>

namespace gvp::simd {

// Data-parallel primitives used by the Gram assembly and the solver inner
// loops. Each entry has a scalar reference implementation and, on x86-64,
// an AVX2/FMA variant selected once at startup. The two variants are
// equivalence-tested; small last-ulp differences from reassociation are
// allowed for the reductions.
struct Ops {
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scal)(double a, double* x, std::size_t n);
  // acc[i] += (c - x[i])^2   (one coordinate of a squared-distance sweep)
  void (*sqdist_accum)(double c, const double* x, double* acc, std::size_t n);
  // out[i] = 1 / sqrt(in[i])
  void (*inv_sqrt)(const double* in, double* out, std::size_t n);
  // out[i] = 1 / in[i]
  void (*reciprocal)(const double* in, double* out, std::size_t n);
  // out[i] = sqrt(in[i])
  void (*sqrt)(const double* in, double* out, std::size_t n);
  const char* name;
};

const Ops& scalar_ops();

bool avx2_available();     // compiled in and supported by this CPU
const Ops& avx2_ops();     // valid only when avx2_available()

// Dispatched table: AVX2 when available unless the GVP_SIMD=scalar
// environment override is set.
const Ops& active_ops();

}  // namespace gvp::simd
