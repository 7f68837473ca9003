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

#ifndef FORSTER_FORSTER_HPP_
#define FORSTER_FORSTER_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include "forster/eigen.hpp"
#include "forster/linalg.hpp"
#include "forster/rounding.hpp"

namespace forster {

struct ForsterConfig {
  double epsilon = 0.25;
  Mode mode = Mode::kPractical;
  // Global constant C; 0 selects the mode default (1e4 theory, 1 practical).
  double constant = 0.0;
  // Overrides; 0 derives the value from epsilon, d, n and C.
  double gamma = 0.0;
  double eta = 0.0;
  double zeta = 0.0;
  double delta = 0.01;
  std::int64_t max_iters = 0;
  std::uint64_t seed = 0;
  bool round_between_steps = true;
  int eigen_retries = 5;
  int line_search_probes = 20;
};

// Constants actually used for an instance of size (n, d).
struct ForsterParams {
  double epsilon = 0.0;
  double constant = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  double delta = 0.0;
  double zeta = 0.0;
  double alpha_case1 = 0.0;
  double target = 0.0;  // 1/d + epsilon^2/d^2.
  std::int64_t max_iters = 0;
  Mode mode = Mode::kPractical;
  int eigen_retries = 5;
  int line_search_probes = 20;
};

ForsterParams ResolveParams(const ForsterConfig& cfg, int n, int d);

enum class StepCase { kCaseI, kCaseII, kCertificate };
std::string_view StepCaseName(StepCase c);

struct ImproveStep {
  StepCase kind = StepCase::kCaseI;
  int k = 0;
  double gap = 0.0;
  double beta = 0.0;
  double alpha = 0.0;        // Used.
  double alpha_nominal = 0.0;  // Before line search.
  double potential_before = 0.0;
  double potential_after = 0.0;
  int probes = 0;
  int v_dim = 0;  // Dimension of the rescaled subspace.
  std::vector<int> big_set;  // X^B in case II.
};

// Result of splitting a decomposition at its largest consecutive gap.
struct GapSplitResult {
  int k = 0;          // Number of directions above the gap.
  double gap = 0.0;
  Subspace top;       // Span of the first k sorted directions.
  Subspace bottom;    // Span of the rest, completed to an orthonormal basis.
  std::vector<double> values;  // Sorted descending.
};

// Throws AllEqual when require_gap is set and no difference exceeds tol.
GapSplitResult SplitByGap(const EigenApprox& e, bool require_gap = false);

struct Certificate {
  Subspace subspace;         // In the input coordinates.
  std::vector<int> members;  // Indices of X inside the subspace.
};

struct ImproveResult {
  bool is_certificate = false;
  Transform next;
  Certificate certificate;
  ImproveStep step;
};

ImproveResult ImproveTransform(const Transform& a, const PointSet& x,
                               const ForsterParams& params, std::uint64_t seed);

enum class OutcomeStatus { kTransform, kDenseSubspace };

struct ForsterOutcome {
  OutcomeStatus status = OutcomeStatus::kTransform;
  Transform transform;
  Certificate certificate;
  std::int64_t iterations = 0;
  double final_potential = 0.0;
  std::vector<double> potential_trace;
  std::vector<ImproveStep> steps;
  int roundings_applied = 0;
  ForsterParams params;
};

ForsterOutcome ForsterTransform(const PointSet& x, const ForsterConfig& cfg);
ForsterOutcome ForsterTransform(const PointSet& x, const ForsterConfig& cfg,
                                const Transform& start);

// Indices i with x_i inside `subspace` (relative residual <= kMembershipTol).
std::vector<int> MembersOf(const PointSet& x, const Subspace& subspace);

// |X cap W| > (n/d) dim W with 0 < dim W < d.
bool IsDenseSubspace(const PointSet& x, const Subspace& w);

}  // namespace forster

#endif  // FORSTER_FORSTER_HPP_
