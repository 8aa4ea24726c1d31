// Runtime kernel selection: AVX2 when present, COLREC_SIMD overrides.
#include <cstdlib>
#include <cstring>

#include "colrec/kernels.hpp"

namespace colrec {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

static const KernelOps& select_kernels() {
  const char* env = std::getenv("COLREC_SIMD");
#if defined(COLREC_HAVE_AVX2_TU)
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return kernels_scalar();
    if (std::strcmp(env, "avx2") == 0) return kernels_avx2();
  }
  if (cpu_has_avx2()) return kernels_avx2();
#else
  (void)env;
#endif
  return kernels_scalar();
}

const KernelOps& kernels() {
  static const KernelOps& ops = select_kernels();
  return ops;
}

}  // namespace colrec
