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

#ifndef FORSTER_ROUNDING_HPP_
#define FORSTER_ROUNDING_HPP_

#include <vector>

#include "forster/eigen.hpp"
#include "forster/linalg.hpp"

namespace forster {

struct RoundConfig {
  double zeta = 1e-6;          // Budget for max_x |f_A(x) - f_A'(x)|.
  double threshold = 0.0;      // Condition threshold N; 0 = (d / zeta)^6.
  double delta_rescale = 0.0;  // Shrink factor; 0 = clamp(2^-b, 8/g, 1/2).
  int max_rounds = 200;
  EigenConfig eigen;
};

// Singular value estimates for a square matrix, in descending order. The
// right singular directions are available from two decompositions, both
// ordered by descending singular value: one of A^T A (accurate for the large
// values) and one of A^-1 A^-T (accurate for the small values).
struct SingularEstimates {
  Vector sigma;
  Matrix directions;
  Matrix inverse_directions;
  double sigma_max_upper = 0.0;  // In [sigma_1, 2 sigma_1].
  double sigma_min_lower = 0.0;  // In [sigma_d / 2, sigma_d].
  double kappa = 0.0;            // sigma_max_upper / sigma_min_lower.
};

SingularEstimates EstimateSingular(const Matrix& a, const EigenConfig& cfg);

// Greedy choice of dataset points: at each stage the remaining point whose
// component outside the span chosen so far is least stretched by A.
struct SetEigenProfile {
  std::vector<int> indices;  // w_i = x[indices[i]].
  std::vector<double> values;  // p_i.
};

SetEigenProfile EigendecompositionFromSet(const Transform& a, const PointSet& x);

struct GapSplit {
  Subspace small;      // Span of the small right singular directions.
  double gap = 1.0;    // Conservative estimate of the largest ratio.
  int large_count = 0; // Number of directions outside `small`.
  SingularEstimates estimates;
};

GapSplit SingularGapSplit(const Transform& a, const EigenConfig& cfg);

// Diagnostics of one condition-reduction step A -> A T.
struct ReduceStep {
  Matrix before;
  Matrix after;
  Subspace v;
  Subspace w;
  Subspace r;
  int m = 0;
  double gap = 0.0;    // G.
  double g = 0.0;
  double rho = 0.0;
  double delta = 0.0;
  double kappa_before = 0.0;
  double kappa_after = 0.0;
  double drift = 0.0;        // Measured max_x |f_A(x) - f_AT(x)|.
  double drift_bound = 0.0;  // 16 / ((g - 1) rho delta).
};

ReduceStep ReduceConditionStep(const Transform& a, const PointSet& x,
                               const RoundConfig& cfg);

struct RoundResult {
  Transform transform;  // Integer-valued entries.
  double kappa_before = 0.0;
  double kappa_after = 0.0;
  double max_drift = 0.0;
  double scale = 0.0;  // Factor applied in the final entry rounding.
  int rounds = 0;
  std::vector<ReduceStep> steps;
};

RoundResult RoundTransform(const Transform& a, const PointSet& x,
                           const RoundConfig& cfg);

// Upper bound on the largest and lower bound on the smallest singular value
// of a tall matrix with full column rank.
struct SingularExtremes {
  double max_upper = 0.0;
  double min_lower = 0.0;
};

SingularExtremes EstimateExtremes(const Matrix& b, const EigenConfig& cfg);

// round((d / (sigma_min_lower * zeta)) * A), entrywise. Throws
// RoundingOverflow if an entry would exceed 2^53.
Matrix RoundEntries(const Matrix& a, double sigma_min_lower, double zeta);

// max_x |f_A(x) - f_B(x)|.
double MaxDrift(const Transform& a, const Transform& b, const PointSet& x);

// Multiplies by the power of two that brings the largest entry into [1, 2).
Matrix NormalizeScale(const Matrix& a);

}  // namespace forster

#endif  // FORSTER_ROUNDING_HPP_
