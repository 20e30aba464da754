// Copyright 2026 The srd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>

namespace srd {

/// One application of the Philox4x32-10 block function (Salmon et al.,
/// SC'11). Pure: the same counter and key always produce the same block on
/// every platform.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based generator. The key is the 64-bit seed; the counter holds a
/// 64-bit block index and a 64-bit stream id, so independent sub-streams
/// (one per speaker, say) come from the same seed without any shared state.
///
/// All derived variates (uniform, normal, gamma, beta) are produced by
/// code in this library rather than <random> distributions, whose output is
/// implementation-defined.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via Box-Muller.
  double normal();
  /// Gamma(shape, 1) via Marsaglia-Tsang.
  double gamma(double shape);
  /// Beta(a, b) as a ratio of gamma variates.
  double beta(double a, double b);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t block_ = 0;
  std::uint64_t stream_;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

/// Deterministic 64-bit sub-seed for sub-stream `index` of `seed`
/// (SplitMix64 finaliser).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace srd
