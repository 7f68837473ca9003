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

#ifndef FORSTER_EIGEN_HPP_
#define FORSTER_EIGEN_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include "forster/linalg.hpp"

namespace forster {

enum class Mode { kPractical, kTheory };

std::string_view ModeName(Mode mode);
Mode ParseMode(std::string_view name);

struct EigenConfig {
  double accuracy = 0.05;       // eta: target multiplicative error.
  double failure_prob = 0.01;   // delta.
  std::int64_t range = 0;       // N for the random integer start; 0 = default.
  std::int64_t power = 0;       // Iteration count override; 0 = per mode.
  std::uint64_t seed = 0;
  Mode mode = Mode::kPractical;
  // Theory mode: power = ceil(theory_constant * d^6 / eta^2 * log(d/delta)).
  double theory_constant = 1.0;
  // Practical mode: first power, doubling until verification passes.
  std::int64_t initial_power = 64;
  std::int64_t max_power = std::int64_t{1} << 30;
  int verify_trials = 128;
  // Verification floor as a fraction of tr M; 0 = max(1e-14, 1e-15/eta).
  double verify_floor = 0.0;
};

// One direction of the decomposition. `direction` is unit length, or exactly
// zero with value 0 when Gram-Schmidt discarded it.
struct EigenPair {
  double value = 0.0;
  Vector direction;
};

struct EigenApprox {
  std::vector<EigenPair> pairs;
  std::int64_t power_used = 0;
  std::int64_t power_nominal = 0;
  std::int64_t range = 0;
  double worst_ratio = 0.0;  // From the last verification, if any.
  bool verified = false;

  int dim() const { return static_cast<int>(pairs.size()); }
};

struct VerifyResult {
  bool passed = false;
  double worst_ratio = 0.0;
};

// Randomized orthogonal iteration from an integer start matrix. In practical
// mode the result has passed VerifyMultiplicative at cfg.accuracy; throws
// EigenFailed if the power cap is reached first.
EigenApprox ApproxEigendecomposition(const Matrix& m, const EigenConfig& cfg);

// Pairs ordered by descending value; equal values keep their input order.
std::vector<EigenPair> SortedDescending(const EigenApprox& e);

// Sum of value * direction * direction^T.
Matrix Reconstruct(const EigenApprox& e);

// Worst |v^T (M - Mhat) v| / max(v^T M v, floor) over the directions of E,
// the coordinate axes, `trials` uniform unit vectors and `trials` vectors
// biased toward the low spectrum of M. `relative_floor` as in EigenConfig.
VerifyResult VerifyMultiplicative(const Matrix& m, const EigenApprox& e,
                                  double eta, int trials, std::uint64_t seed,
                                  double relative_floor = 0.0);

std::int64_t DefaultRange(int d, double failure_prob);
std::int64_t TheoryPower(int d, double accuracy, double failure_prob,
                         double constant);

}  // namespace forster

#endif  // FORSTER_EIGEN_HPP_
