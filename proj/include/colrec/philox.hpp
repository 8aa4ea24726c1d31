// Philox4x32-10 counter-based generator: stateless block function plus a
// stream wrapper. Streams are addressed by (key, path), so any worker can
// reproduce any draw from (seed, indices) without coordination.
#pragma once

#include <array>
#include <cstdint>

namespace colrec {

struct Philox4x32 {
  static constexpr uint32_t kMul0 = 0xD2511F53u;
  static constexpr uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

  static inline std::array<uint32_t, 4> block(std::array<uint32_t, 4> c,
                                              std::array<uint32_t, 2> k) {
    for (int r = 0; r < 10; ++r) {
      const uint64_t p0 = static_cast<uint64_t>(kMul0) * c[0];
      const uint64_t p1 = static_cast<uint64_t>(kMul1) * c[2];
      const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
      const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
      c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return c;
  }

  // One 128-bit block addressed as (key64, hi64, lo64) -> two u64 outputs.
  static inline void block64(uint64_t key, uint64_t hi, uint64_t lo, uint64_t out[2]) {
    const std::array<uint32_t, 4> c = {static_cast<uint32_t>(lo), static_cast<uint32_t>(lo >> 32),
                                       static_cast<uint32_t>(hi), static_cast<uint32_t>(hi >> 32)};
    const std::array<uint32_t, 2> k = {static_cast<uint32_t>(key), static_cast<uint32_t>(key >> 32)};
    const auto o = block(c, k);
    out[0] = (static_cast<uint64_t>(o[1]) << 32) | o[0];
    out[1] = (static_cast<uint64_t>(o[3]) << 32) | o[2];
  }
};

}  // namespace colrec
