// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace gmc {

// Philox4x32-10 (Salmon et al., SC'11). Counter-based, so any block of any
// stream can be produced without touching the others.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += w0;
    key[1] += w1;
  }
  return ctr;
}

// Named substream tags. Every random quantity in the library draws from a
// stream keyed by (seed, replica, shell, tag).
enum class StreamTag : std::uint32_t {
  field = 0,
  brownian = 1,
  oracle = 2,
  shift = 3,
  permutation = 4,
};

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t replica, std::uint32_t shell, StreamTag tag)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        replica_(replica),
        shell_(shell),
        tag_(static_cast<std::uint32_t>(tag)) {}

  std::uint32_t next_u32() {
    if (used_ == 4) refill();
    return buffer_[used_++];
  }

  // Uniform on (0, 1), 53-bit resolution, never 0.
  double uniform() {
    const std::uint64_t hi = next_u32() >> 5;  // 27 bits
    const std::uint64_t lo = next_u32() >> 6;  // 26 bits
    return (static_cast<double>((hi << 26) | lo) + 0.5) * 0x1.0p-53;
  }

  // Box-Muller; the spare variate is cached so each pair of normals uses
  // exactly one Philox block.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  void fill_normal(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = normal();
  }

  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = (0x100000000ull / n) * n;
    for (;;) {
      const std::uint64_t v = next_u32();
      if (n <= 0x100000000ull && v < limit) return v % n;
      if (n > 0x100000000ull) return ((v << 32) | next_u32()) % n;
    }
  }

 private:
  void refill() {
    buffer_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32) ^ (shell_ << 8) ^ tag_,
                          static_cast<std::uint32_t>(replica_), static_cast<std::uint32_t>(replica_ >> 32) ^ 0x6D63u},
                         key_);
    ++block_;
    used_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t replica_;
  std::uint32_t shell_;
  std::uint32_t tag_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gmc
