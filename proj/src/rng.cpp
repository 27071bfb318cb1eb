// Copyright 2026 The qelm authors
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

#include "qelm/rng.hpp"

#include <cmath>
#include <numbers>

namespace qelm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double RandomStream::normal() {
  // 1 - uniform() lies in (0, 1], so the log is finite.
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log1p(-u1));
  return radius * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> RandomStream::complex_normal() {
  // Sequenced explicitly: argument evaluation order inside an initializer
  // would be unspecified and break cross-compiler determinism.
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

RandomStream derive_substream(std::uint64_t master_seed,
                              std::span<const std::uint64_t> labels) {
  std::uint64_t state = splitmix64(master_seed);
  for (const std::uint64_t label : labels) {
    state = splitmix64(state ^ splitmix64(label + 0x243F6A8885A308D3ULL));
  }
  return RandomStream(state);
}

RandomStream derive_substream(std::uint64_t master_seed,
                              std::initializer_list<std::uint64_t> labels) {
  return derive_substream(
      master_seed, std::span<const std::uint64_t>(labels.begin(), labels.size()));
}

}  // namespace qelm
