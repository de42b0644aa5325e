// Copyright 2026 The catreverse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CATREVERSE_PHILOX_HPP
#define CATREVERSE_PHILOX_HPP

#include <array>
#include <cstdint>

namespace catrev {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Every draw is a pure function of (key, counter), so independent streams
// can be derived from (seed, stream id) without any shared state and any
// worker may produce any stream's values in any order.
class Philox4x32 {
 public:
  using Block = std::array<uint32_t, 4>;

  explicit constexpr Philox4x32(uint64_t seed) noexcept
      : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)} {}

  constexpr Block operator()(Block ctr) const noexcept {
    std::array<uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      const uint64_t p0 = static_cast<uint64_t>(kMulA) * ctr[0];
      const uint64_t p1 = static_cast<uint64_t>(kMulB) * ctr[2];
      const auto hi0 = static_cast<uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<uint32_t>(p0);
      const auto hi1 = static_cast<uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeylA;
      key[1] += kWeylB;
    }
    return ctr;
  }

  // Convenience: counter assembled from two 64-bit words.
  constexpr Block operator()(uint64_t lo, uint64_t hi) const noexcept {
    return (*this)(Block{static_cast<uint32_t>(lo), static_cast<uint32_t>(lo >> 32),
                         static_cast<uint32_t>(hi), static_cast<uint32_t>(hi >> 32)});
  }

 private:
  static constexpr uint32_t kMulA = 0xD2511F53;
  static constexpr uint32_t kMulB = 0xCD9E8D57;
  static constexpr uint32_t kWeylA = 0x9E3779B9;
  static constexpr uint32_t kWeylB = 0xBB67AE85;

  std::array<uint32_t, 2> key_;
};

// Uniform double in (0, 1) from 32 random bits. Platform independent.
constexpr double unit_open(uint32_t bits) noexcept {
  return (static_cast<double>(bits) + 0.5) * 0x1p-32;
}

// Uniform double in [0, 1) from 64 random bits (53-bit resolution).
constexpr double unit_closed_open(uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1p-53;
}

constexpr uint64_t combine(uint32_t lo, uint32_t hi) noexcept {
  return static_cast<uint64_t>(lo) | (static_cast<uint64_t>(hi) << 32);
}

// Unbiased-enough index in [0, n) from 64 random bits (multiply-shift).
inline uint64_t bounded_index(uint64_t bits, uint64_t n) noexcept {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

}  // namespace catrev

#endif  // CATREVERSE_PHILOX_HPP
