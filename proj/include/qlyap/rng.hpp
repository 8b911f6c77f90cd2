// Copyright 2026 The qlyap Authors
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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace qlyap {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based standard-normal stream keyed by a 64-bit seed. Draw i is a
/// pure function of (seed, i), so any subsequence can be regenerated without
/// replaying the prefix.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform(std::uint64_t index) const;
  /// Standard normal draw number `index` (Box-Muller on a Philox block).
  double normal(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
};

/// Wiener increments dW_i ~ Normal(0, dt), reproducible from the seed.
struct WienerPath {
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::vector<double> increments;

  static WienerPath generate(std::uint64_t seed, double dt, std::size_t steps);
  /// Sums consecutive groups of `factor` increments: the same Brownian path
  /// sampled on a grid `factor` times coarser.
  WienerPath coarsen(std::size_t factor) const;
};

}  // namespace qlyap
