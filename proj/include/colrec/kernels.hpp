// Batch kernels for the hot sampling loops: counter-based uniform fill,
// quantile-table interpolation, and shifted exp reductions.
//
// Every kernel has a scalar reference implementation and (on x86-64) an AVX2
// variant selected at runtime. The two are bit-identical by contract: they
// share the same polynomial exp, the same fma placement, and the same
// 4-accumulator reduction order, which the kernel equivalence tests assert.
#pragma once

#include <cstddef>
#include <cstdint>

namespace colrec {

struct KernelOps {
  // out[i] = uniform double in [0,1) from Philox counter (key, hi, lo0 + i/2).
  void (*fill_uniform)(uint64_t key, uint64_t hi, uint64_t lo0, double* out, size_t n);
  // Raw 64-bit words from the same counter layout.
  void (*fill_u64)(uint64_t key, uint64_t hi, uint64_t lo0, uint64_t* out, size_t n);
  // out[i] = table[j] + frac*(table[j+1]-table[j]) at position u[i]*(tn-1).
  void (*gather_lerp)(const double* table, size_t tn, const double* u, double* out, size_t n);
  // Same, followed by exp(); used for tables stored in log space.
  void (*gather_lerp_exp)(const double* table, size_t tn, const double* u, double* out, size_t n);
  // Returns sum_i exp(shift - z[i]) with the fixed 4-lane accumulation order.
  double (*exp_shift_sum)(const double* z, size_t n, double shift);
  // Minimum of z[0..n); n >= 1.
  double (*min_val)(const double* z, size_t n);
  // Sum with the fixed 4-lane accumulation order.
  double (*sum4)(const double* x, size_t n);
  const char* name;
};

// Active implementation: AVX2 when the CPU supports it, unless overridden by
// the COLREC_SIMD environment variable ("scalar", "avx2", "auto").
const KernelOps& kernels();

const KernelOps& kernels_scalar();
#if defined(COLREC_HAVE_AVX2_TU)
const KernelOps& kernels_avx2();
#endif
bool cpu_has_avx2();

// Saturating exp shared by all kernel variants (and exposed for tests):
// overflow -> inf, deep underflow -> 0, subnormals handled by two-step
// scaling. Accuracy is a couple of ulp, identical bits in scalar and SIMD.
double xexp(double x);

}  // namespace colrec
