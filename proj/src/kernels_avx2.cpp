// AVX2 kernel variants. Bit-identical to the scalar reference: same Philox
// rounds, same Pade exp with the same fma placement, same 4-lane reduction
// order. The equivalence tests compare outputs bit for bit.
#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <cstring>

#include "colrec/kernels.hpp"
#include "colrec/philox.hpp"

namespace colrec {

namespace {

constexpr double LOG2E = 1.4426950408889634073599;
constexpr double C1 = 6.93145751953125e-1;
constexpr double C2 = 1.42860682030941723212e-6;
constexpr double P0 = 1.26177193074810590878e-4;
constexpr double P1 = 3.02994407707441961300e-2;
constexpr double P2 = 9.99999999999999999910e-1;
constexpr double Q0 = 3.00198505138664455042e-6;
constexpr double Q1 = 2.52448340349684104192e-3;
constexpr double Q2 = 2.27265548208155028766e-1;
constexpr double Q3 = 2.00000000000000000005e0;
constexpr double MAXLOG = 709.782712893383996843;
constexpr double MINLOG = -745.3;

inline __m256d splat(double x) { return _mm256_set1_pd(x); }

// Vector mirror of scalbn2(): y * 2^n via two half-steps.
inline __m256d vscalbn2(__m256d y, __m256d n) {
  const __m256d n1 = _mm256_round_pd(_mm256_mul_pd(n, splat(0.5)),
                                     _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC);
  const __m256d n2 = _mm256_sub_pd(n, n1);
  const __m128i i1 = _mm256_cvtpd_epi32(n1);
  const __m128i i2 = _mm256_cvtpd_epi32(n2);
  const __m256i e1 = _mm256_add_epi64(_mm256_cvtepi32_epi64(i1), _mm256_set1_epi64x(1023));
  const __m256i e2 = _mm256_add_epi64(_mm256_cvtepi32_epi64(i2), _mm256_set1_epi64x(1023));
  const __m256d f1 = _mm256_castsi256_pd(_mm256_slli_epi64(e1, 52));
  const __m256d f2 = _mm256_castsi256_pd(_mm256_slli_epi64(e2, 52));
  return _mm256_mul_pd(_mm256_mul_pd(y, f1), f2);
}

inline __m256d vexp(__m256d x) {
  const __m256d n = _mm256_floor_pd(_mm256_fmadd_pd(splat(LOG2E), x, splat(0.5)));
  __m256d r = _mm256_fmadd_pd(_mm256_sub_pd(_mm256_setzero_pd(), n), splat(C1), x);
  r = _mm256_fmadd_pd(_mm256_sub_pd(_mm256_setzero_pd(), n), splat(C2), r);
  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d px = _mm256_fmadd_pd(splat(P0), rr, splat(P1));
  px = _mm256_fmadd_pd(px, rr, splat(P2));
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_fmadd_pd(splat(Q0), rr, splat(Q1));
  qx = _mm256_fmadd_pd(qx, rr, splat(Q2));
  qx = _mm256_fmadd_pd(qx, rr, splat(Q3));
  const __m256d t = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  const __m256d y = _mm256_add_pd(splat(1.0), _mm256_mul_pd(splat(2.0), t));
  __m256d out = vscalbn2(y, n);
  const __m256d hi = _mm256_cmp_pd(x, splat(MAXLOG), _CMP_GT_OQ);
  const __m256d lo = _mm256_cmp_pd(x, splat(MINLOG), _CMP_LT_OQ);
  out = _mm256_blendv_pd(out, splat(HUGE_VAL), hi);
  out = _mm256_blendv_pd(out, _mm256_setzero_pd(), lo);
  return out;
}

// ---- Philox4x32-10, four blocks per pass ------------------------------------

struct PhiloxVec {
  __m256i c0, c1, c2, c3;  // 32-bit words in the low half of each 64-bit lane
};

inline void philox_rounds(PhiloxVec& s, uint32_t key0, uint32_t key1) {
  const __m256i m0 = _mm256_set1_epi64x(Philox4x32::kMul0);
  const __m256i m1 = _mm256_set1_epi64x(Philox4x32::kMul1);
  const __m256i low32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  __m256i k0 = _mm256_set1_epi64x(key0);
  __m256i k1 = _mm256_set1_epi64x(key1);
  const __m256i w0 = _mm256_set1_epi64x(Philox4x32::kWeyl0);
  const __m256i w1 = _mm256_set1_epi64x(Philox4x32::kWeyl1);
  for (int r = 0; r < 10; ++r) {
    const __m256i p0 = _mm256_mul_epu32(s.c0, m0);
    const __m256i p1 = _mm256_mul_epu32(s.c2, m1);
    const __m256i hi0 = _mm256_srli_epi64(p0, 32);
    const __m256i lo0 = _mm256_and_si256(p0, low32);
    const __m256i hi1 = _mm256_srli_epi64(p1, 32);
    const __m256i lo1 = _mm256_and_si256(p1, low32);
    const __m256i n0 =
        _mm256_and_si256(_mm256_xor_si256(_mm256_xor_si256(hi1, s.c1), k0), low32);
    const __m256i n2 =
        _mm256_and_si256(_mm256_xor_si256(_mm256_xor_si256(hi0, s.c3), k1), low32);
    s.c0 = n0;
    s.c1 = lo1;
    s.c2 = n2;
    s.c3 = lo0;
    k0 = _mm256_and_si256(_mm256_add_epi64(k0, w0), low32);
    k1 = _mm256_and_si256(_mm256_add_epi64(k1, w1), low32);
  }
}

// Exact u64 (< 2^53) -> double, matching static_cast<double>.
inline __m256d u53_to_double(__m256i v) {
  const __m256i low32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000ll);  // 2^52
  const __m256i lo = _mm256_or_si256(_mm256_and_si256(v, low32), magic);
  const __m256i hi = _mm256_or_si256(_mm256_srli_epi64(v, 32), magic);
  const __m256d dlo = _mm256_sub_pd(_mm256_castsi256_pd(lo), _mm256_castsi256_pd(magic));
  const __m256d dhi = _mm256_sub_pd(_mm256_castsi256_pd(hi), _mm256_castsi256_pd(magic));
  return _mm256_add_pd(_mm256_mul_pd(dhi, splat(4294967296.0)), dlo);
}

// Four Philox blocks per pass; lane b of (u0, u1) is the (2b, 2b+1) output
// pair for counters ctr..ctr+3.
inline void philox4_blocks(uint64_t key, const __m256i hi_lo32, const __m256i hi_hi32,
                           uint64_t ctr, __m256i& u0, __m256i& u1) {
  PhiloxVec s;
  const __m256i ctrv = _mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(ctr)),
                                        _mm256_set_epi64x(3, 2, 1, 0));
  const __m256i low32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  s.c0 = _mm256_and_si256(ctrv, low32);
  s.c1 = _mm256_srli_epi64(ctrv, 32);
  s.c2 = hi_lo32;
  s.c3 = hi_hi32;
  philox_rounds(s, static_cast<uint32_t>(key), static_cast<uint32_t>(key >> 32));
  u0 = _mm256_or_si256(_mm256_slli_epi64(s.c1, 32), s.c0);
  u1 = _mm256_or_si256(_mm256_slli_epi64(s.c3, 32), s.c2);
}

void v_fill_uniform(uint64_t key, uint64_t hi, uint64_t lo0, double* out, size_t n) {
  const __m256i hi_lo32 = _mm256_set1_epi64x(static_cast<uint32_t>(hi));
  const __m256i hi_hi32 = _mm256_set1_epi64x(static_cast<uint32_t>(hi >> 32));
  size_t i = 0;
  uint64_t ctr = lo0;
  while (i + 8 <= n) {
    __m256i u0, u1;
    philox4_blocks(key, hi_lo32, hi_hi32, ctr, u0, u1);
    const __m256d d0 = _mm256_mul_pd(u53_to_double(_mm256_srli_epi64(u0, 11)),
                                     splat(0x1.0p-53));
    const __m256d d1 = _mm256_mul_pd(u53_to_double(_mm256_srli_epi64(u1, 11)),
                                     splat(0x1.0p-53));
    alignas(32) double a0[4], a1[4];
    _mm256_store_pd(a0, d0);
    _mm256_store_pd(a1, d1);
    for (int b = 0; b < 4; ++b) {
      out[i + 2 * static_cast<size_t>(b)] = a0[b];
      out[i + 2 * static_cast<size_t>(b) + 1] = a1[b];
    }
    i += 8;
    ctr += 4;
  }
  if (i < n) kernels_scalar().fill_uniform(key, hi, ctr, out + i, n - i);
}

void v_fill_u64(uint64_t key, uint64_t hi, uint64_t lo0, uint64_t* out, size_t n) {
  const __m256i hi_lo32 = _mm256_set1_epi64x(static_cast<uint32_t>(hi));
  const __m256i hi_hi32 = _mm256_set1_epi64x(static_cast<uint32_t>(hi >> 32));
  size_t i = 0;
  uint64_t ctr = lo0;
  while (i + 8 <= n) {
    __m256i u0, u1;
    philox4_blocks(key, hi_lo32, hi_hi32, ctr, u0, u1);
    alignas(32) uint64_t a0[4], a1[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(a0), u0);
    _mm256_store_si256(reinterpret_cast<__m256i*>(a1), u1);
    for (int b = 0; b < 4; ++b) {
      out[i + 2 * static_cast<size_t>(b)] = a0[b];
      out[i + 2 * static_cast<size_t>(b) + 1] = a1[b];
    }
    i += 8;
    ctr += 4;
  }
  if (i < n) kernels_scalar().fill_u64(key, hi, ctr, out + i, n - i);
}

void v_gather_lerp(const double* table, size_t tn, const double* u, double* out, size_t n) {
  const __m256d scale = splat(static_cast<double>(tn - 1));
  const __m128i maxj = _mm_set1_epi32(static_cast<int>(tn - 2));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d uu = _mm256_loadu_pd(u + i);
    const __m256d pos = _mm256_mul_pd(uu, scale);
    __m128i j = _mm256_cvttpd_epi32(pos);
    j = _mm_min_epi32(j, maxj);
    const __m256d jd = _mm256_cvtepi32_pd(j);
    const __m256d frac = _mm256_sub_pd(pos, jd);
    const __m256d t0 = _mm256_i32gather_pd(table, j, 8);
    const __m256d t1 = _mm256_i32gather_pd(table + 1, j, 8);
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(frac, _mm256_sub_pd(t1, t0), t0));
  }
  if (i < n) kernels_scalar().gather_lerp(table, tn, u + i, out + i, n - i);
}

void v_gather_lerp_exp(const double* table, size_t tn, const double* u, double* out,
                       size_t n) {
  const __m256d scale = splat(static_cast<double>(tn - 1));
  const __m128i maxj = _mm_set1_epi32(static_cast<int>(tn - 2));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d uu = _mm256_loadu_pd(u + i);
    const __m256d pos = _mm256_mul_pd(uu, scale);
    __m128i j = _mm256_cvttpd_epi32(pos);
    j = _mm_min_epi32(j, maxj);
    const __m256d jd = _mm256_cvtepi32_pd(j);
    const __m256d frac = _mm256_sub_pd(pos, jd);
    const __m256d t0 = _mm256_i32gather_pd(table, j, 8);
    const __m256d t1 = _mm256_i32gather_pd(table + 1, j, 8);
    _mm256_storeu_pd(out + i, vexp(_mm256_fmadd_pd(frac, _mm256_sub_pd(t1, t0), t0)));
  }
  if (i < n) kernels_scalar().gather_lerp_exp(table, tn, u + i, out + i, n - i);
}

double v_exp_shift_sum(const double* z, size_t n, double shift) {
  __m256d vacc = _mm256_setzero_pd();
  const __m256d vshift = splat(shift);
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    vacc = _mm256_add_pd(vacc, vexp(_mm256_sub_pd(vshift, _mm256_loadu_pd(z + i))));
  alignas(32) double acc[4];
  _mm256_store_pd(acc, vacc);
  for (; i < n; ++i) acc[i & 3] += xexp(shift - z[i]);
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double v_min_val(const double* z, size_t n) {
  if (n < 8) return kernels_scalar().min_val(z, n);
  __m256d vm = _mm256_loadu_pd(z);
  size_t i = 4;
  for (; i + 4 <= n; i += 4) vm = _mm256_min_pd(vm, _mm256_loadu_pd(z + i));
  alignas(32) double m4[4];
  _mm256_store_pd(m4, vm);
  double m = m4[0];
  for (int l = 1; l < 4; ++l)
    if (m4[l] < m) m = m4[l];
  for (; i < n; ++i)
    if (z[i] < m) m = z[i];
  return m;
}

double v_sum4(const double* x, size_t n) {
  __m256d vacc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) vacc = _mm256_add_pd(vacc, _mm256_loadu_pd(x + i));
  alignas(32) double acc[4];
  _mm256_store_pd(acc, vacc);
  for (; i < n; ++i) acc[i & 3] += x[i];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

}  // namespace

const KernelOps& kernels_avx2() {
  static const KernelOps ops = {v_fill_uniform, v_fill_u64,      v_gather_lerp,
                                v_gather_lerp_exp, v_exp_shift_sum, v_min_val,
                                v_sum4,            "avx2"};
  return ops;
}

}  // namespace colrec
