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

#ifndef FORSTER_DECOMPOSITION_HPP_
#define FORSTER_DECOMPOSITION_HPP_

#include <vector>

#include "forster/forster.hpp"
#include "forster/linalg.hpp"

namespace forster {

// A subspace V holding at least (n/d) dim V of the points, with a transform
// that puts those points in approximate radial isotropic position inside V.
struct ForsterDecomposition {
  Subspace v;
  Matrix embed;  // dim V x d, rows are V's orthonormal basis.
  Transform transform;  // On R^{dim V}.
  std::vector<int> members;
  int depth = 0;
  ForsterOutcome outcome;  // Of the final level.

  // transform * embed * x.
  Vector Map(const Vector& x) const { return transform.matrix() * (embed * x); }
};

ForsterDecomposition ForsterSubspace(const PointSet& x, const ForsterConfig& cfg);

}  // namespace forster

#endif  // FORSTER_DECOMPOSITION_HPP_
