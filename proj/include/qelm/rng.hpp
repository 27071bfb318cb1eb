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

#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace qelm {

// Deterministic random stream.
//
// All variates are derived from raw mt19937_64 output with fixed algorithms
// (53-bit uniforms, Box-Muller normals) instead of std::*_distribution, whose
// output is implementation-defined. A given seed therefore produces the same
// byte-identical sequence on every platform and standard library, which the
// reproducibility guarantees of the experiment harness rely on.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes exactly two engine outputs.
  double normal();

  // Complex normal with E[|z|^2] = 1 (real and imaginary parts are
  // independent N(0, 1/2)); consumes exactly four engine outputs.
  std::complex<double> complex_normal();

 private:
  std::mt19937_64 engine_;
};

// Derives a child stream from a master seed and a label path by chaining a
// splitmix64-style mixer over the labels. Same (seed, labels) always yields
// the same stream; distinct label paths yield statistically independent
// streams. This is what makes parallel sweeps independent of scheduling:
// every (realization, input, ...) coordinate owns a private stream.
RandomStream derive_substream(std::uint64_t master_seed,
                              std::span<const std::uint64_t> labels);
RandomStream derive_substream(std::uint64_t master_seed,
                              std::initializer_list<std::uint64_t> labels);

}  // namespace qelm
