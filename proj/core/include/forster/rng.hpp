/*
 * Copyright 2026 The forster Authors.
 *
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

#ifndef FORSTER_RNG_HPP_
#define FORSTER_RNG_HPP_

#include <cstdint>
#include <random>

#include "forster/linalg.hpp"

namespace forster {

// splitmix64 finalizer; used to derive independent substream seeds.
std::uint64_t SplitMix64(std::uint64_t x);

// Seeded generator. All library randomness flows through explicit Rng
// values; there is no global state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(SplitMix64(seed)) {}

  // Independent generator for (seed, stream).
  static Rng Substream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(SplitMix64(seed) ^ SplitMix64(stream + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t Next() { return engine_(); }
  double Uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double Normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  // Uniform on {lo, ..., hi}.
  std::int64_t Integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  Vector GaussianVector(int d);
  Vector UnitSphere(int d);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace forster

#endif  // FORSTER_RNG_HPP_
