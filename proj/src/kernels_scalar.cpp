// Scalar reference kernels. These define the bit-level contract the AVX2
// variants must reproduce.
#include <cmath>
#include <cstring>

#include "colrec/kernels.hpp"
#include "colrec/philox.hpp"

namespace colrec {

// Cephes-style exp: Pade approximant on [-ln2/2, ln2/2] plus exponent scaling.
// Scaling is done in two steps so subnormal results stay exact.
namespace expconst {
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
}  // namespace expconst

static inline double scalbn2(double y, int n) {
  // y * 2^n via two half-steps; covers the subnormal range.
  const int n1 = n / 2;
  const int n2 = n - n1;
  const uint64_t b1 = static_cast<uint64_t>(1023 + n1) << 52;
  const uint64_t b2 = static_cast<uint64_t>(1023 + n2) << 52;
  double f1, f2;
  std::memcpy(&f1, &b1, 8);
  std::memcpy(&f2, &b2, 8);
  return (y * f1) * f2;
}

double xexp(double x) {
  using namespace expconst;
  if (x != x) return x;
  if (x > MAXLOG) return HUGE_VAL;
  if (x < MINLOG) return 0.0;
  double n = std::floor(std::fma(LOG2E, x, 0.5));
  const int ni = static_cast<int>(n);
  double r = std::fma(-n, C1, x);
  r = std::fma(-n, C2, r);
  const double rr = r * r;
  double px = std::fma(P0, rr, P1);
  px = std::fma(px, rr, P2);
  px *= r;
  double qx = std::fma(Q0, rr, Q1);
  qx = std::fma(qx, rr, Q2);
  qx = std::fma(qx, rr, Q3);
  const double y = 1.0 + 2.0 * (px / (qx - px));
  return scalbn2(y, ni);
}

namespace {

void s_fill_uniform(uint64_t key, uint64_t hi, uint64_t lo0, double* out, size_t n) {
  uint64_t blk[2];
  size_t i = 0;
  uint64_t ctr = lo0;
  while (i + 2 <= n) {
    Philox4x32::block64(key, hi, ctr++, blk);
    out[i++] = static_cast<double>(blk[0] >> 11) * 0x1.0p-53;
    out[i++] = static_cast<double>(blk[1] >> 11) * 0x1.0p-53;
  }
  if (i < n) {
    Philox4x32::block64(key, hi, ctr, blk);
    out[i] = static_cast<double>(blk[0] >> 11) * 0x1.0p-53;
  }
}

void s_fill_u64(uint64_t key, uint64_t hi, uint64_t lo0, uint64_t* out, size_t n) {
  uint64_t blk[2];
  size_t i = 0;
  uint64_t ctr = lo0;
  while (i + 2 <= n) {
    Philox4x32::block64(key, hi, ctr++, blk);
    out[i++] = blk[0];
    out[i++] = blk[1];
  }
  if (i < n) {
    Philox4x32::block64(key, hi, ctr, blk);
    out[i] = blk[0];
  }
}

inline double lerp_at(const double* table, size_t tn, double u) {
  const double pos = u * static_cast<double>(tn - 1);
  size_t j = static_cast<size_t>(pos);
  if (j > tn - 2) j = tn - 2;
  const double frac = pos - static_cast<double>(j);
  return std::fma(frac, table[j + 1] - table[j], table[j]);
}

void s_gather_lerp(const double* table, size_t tn, const double* u, double* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = lerp_at(table, tn, u[i]);
}

void s_gather_lerp_exp(const double* table, size_t tn, const double* u, double* out,
                       size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = xexp(lerp_at(table, tn, u[i]));
}

double s_exp_shift_sum(const double* z, size_t n, double shift) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (size_t i = 0; i < n; ++i) acc[i & 3] += xexp(shift - z[i]);
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double s_min_val(const double* z, size_t n) {
  double m = z[0];
  for (size_t i = 1; i < n; ++i)
    if (z[i] < m) m = z[i];
  return m;
}

double s_sum4(const double* x, size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (size_t i = 0; i < n; ++i) acc[i & 3] += x[i];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

}  // namespace

const KernelOps& kernels_scalar() {
  static const KernelOps ops = {s_fill_uniform, s_fill_u64,     s_gather_lerp,
                                s_gather_lerp_exp, s_exp_shift_sum, s_min_val,
                                s_sum4,            "scalar"};
  return ops;
}

}  // namespace colrec
