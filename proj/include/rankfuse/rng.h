/*
 * Copyright 2026 The rankfuse Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RANKFUSE_RNG_H_
#define RANKFUSE_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>

namespace rankfuse {

// Seeded generator shared by every stochastic step (shuffles, mining,
// augmentation, synthetic data). Copying snapshots the stream, which the
// gradient checks rely on to replay identical sampling decisions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double Uniform() { return std::uniform_real_distribution<double>()(engine_); }
  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  // Uniform in [lo, hi], inclusive of hi.
  double UniformClosed(double lo, double hi);
  // Uniform index in [0, n); n must be positive.
  std::size_t Index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  double Normal() { return std::normal_distribution<double>()(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rankfuse

#endif  // RANKFUSE_RNG_H_
