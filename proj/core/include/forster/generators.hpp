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

#ifndef FORSTER_GENERATORS_HPP_
#define FORSTER_GENERATORS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "forster/linalg.hpp"
#include "forster/rng.hpp"

namespace forster {

// Ground truth recorded alongside a generated instance.
struct GeneratorTruth {
  std::string spec;
  Vector halfspace;          // Unit normal, empty if unlabeled.
  double margin = 0.0;       // Minimum |w.x| / |x| guaranteed.
  Matrix planted_basis;      // Columns span the planted subspace, if any.
  std::vector<int> planted_members;
  std::vector<int> flipped;  // Indices whose labels were flipped.
};

struct GeneratedData {
  PointSet points;
  GeneratorTruth truth;
};

PointSet SphereUniform(int n, int d, Rng& rng);
PointSet GaussianPoints(int n, int d, Rng& rng);

// round(fraction * n) points on a random k-dimensional subspace, the rest
// Gaussian.
GeneratedData DenseSubspace(int n, int d, int k, double fraction, Rng& rng);

// Uniform points on the sphere, rejection sampled so that |w.x| >= margin,
// labeled by sign(w.x); w is drawn from `w_seed`.
GeneratedData MarginHalfspace(int n, int d, double margin, std::uint64_t w_seed,
                              Rng& rng);

// Uniform points on the sphere labeled by sign(w.x) for a given unit w.
PointSet LabeledSphere(int n, const Vector& w, Rng& rng);

// Parses one of
//   sphere-uniform | gaussian | dense-subspace:k:fraction |
//   margin-halfspace:margin:w_seed | rcn:eta:<inner spec>
// and generates n points in R^d. Throws BadSpec.
GeneratedData Generate(std::string_view spec, int n, int d, std::uint64_t seed);

}  // namespace forster

#endif  // FORSTER_GENERATORS_HPP_
