// Copyright 2025 The Authors.
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

#ifndef NOCG_RNG_HPP
#define NOCG_RNG_HPP

#include <cmath>
#include <cstdint>

#include "nocg/vec.hpp"

namespace nocg {

// Counter-derived streams: every (master seed, phase, iteration, sample index)
// tuple maps to an independent stream, so batches can be evaluated in any
// order or on any number of threads without changing the result.

inline uint64_t mix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  explicit RngStream(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the paired draw is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  Vec normal_vec(size_t d) {
    Vec v(d);
    for (size_t i = 0; i < d; ++i) v[i] = normal();
    return v;
  }

 private:
  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

namespace phase {
// Stream domains; solvers and estimators never share a domain.
constexpr uint64_t kAnchor = 1;
constexpr uint64_t kPath = 2;
constexpr uint64_t kReport = 3;
constexpr uint64_t kOutputSelect = 4;
constexpr uint64_t kCheck = 5;
constexpr uint64_t kTest = 100;
}  // namespace phase

inline RngStream derive_stream(uint64_t master, uint64_t phase_id, uint64_t iteration,
                               uint64_t index) {
  uint64_t h = mix64(master ^ 0x8AC7230489E80000ULL);
  h = mix64(h ^ mix64(phase_id));
  h = mix64(h ^ mix64(iteration));
  h = mix64(h ^ mix64(index));
  return RngStream(h);
}

// Per-sample stream factory for one (phase, iteration) slot.
struct StreamSeq {
  uint64_t master = 0;
  uint64_t phase_id = 0;
  uint64_t iteration = 0;

  RngStream at(uint64_t sample_index) const {
    return derive_stream(master, phase_id, iteration, sample_index);
  }
};

}  // namespace nocg

#endif  // NOCG_RNG_HPP
