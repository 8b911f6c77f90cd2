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

#include "qlyap/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qlyap {

namespace {
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t block_index) {
  return philox4x32({static_cast<std::uint32_t>(block_index),
                     static_cast<std::uint32_t>(block_index >> 32), 0u, 0u},
                    {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
}
}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

double NormalStream::uniform(std::uint64_t index) const {
  const auto b = block(seed_ ^ 0x5851F42D4C957F2Dull, index / 2);
  return index % 2 == 0 ? to_open_unit(b[0], b[1]) : to_open_unit(b[2], b[3]);
}

double NormalStream::normal(std::uint64_t index) const {
  const auto b = block(seed_, index / 2);
  const double u1 = to_open_unit(b[0], b[1]);
  const double u2 = to_open_unit(b[2], b[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return index % 2 == 0 ? radius * std::cos(angle) : radius * std::sin(angle);
}

WienerPath WienerPath::generate(std::uint64_t seed, double dt, std::size_t steps) {
  if (!(dt > 0.0)) throw std::domain_error("WienerPath::generate: dt must be positive");
  WienerPath path{seed, dt, {}};
  path.increments.resize(steps);
  const NormalStream stream(seed);
  const double scale = std::sqrt(dt);
  for (std::size_t i = 0; i < steps; ++i) path.increments[i] = scale * stream.normal(i);
  return path;
}

WienerPath WienerPath::coarsen(std::size_t factor) const {
  if (factor == 0 || increments.size() % factor != 0) {
    throw std::invalid_argument("WienerPath::coarsen: factor must divide the step count");
  }
  WienerPath out{seed, dt * static_cast<double>(factor), {}};
  out.increments.resize(increments.size() / factor);
  for (std::size_t i = 0; i < out.increments.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < factor; ++j) sum += increments[i * factor + j];
    out.increments[i] = sum;
  }
  return out;
}

}  // namespace qlyap
