#include <cstdlib>
#include <cstring>

#include "gvp/simd.hpp"

namespace gvp::simd {

bool avx2_available() {
#if defined(GVP_BUILD_AVX2) && (defined(__x86_64__) || defined(_M_X64))
  static const bool ok =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

#if !defined(GVP_BUILD_AVX2)
const Ops& avx2_ops() { return scalar_ops(); }
#endif

const Ops& active_ops() {
  static const Ops* chosen = [] {
    const char* env = std::getenv("GVP_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return &scalar_ops();
    if (avx2_available()) return &avx2_ops();
    return &scalar_ops();
  }();
  return *chosen;
}

}  // namespace gvp::simd
