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

#include "forster/decomposition.hpp"

#include <string>

#include "forster/rng.hpp"

namespace forster {

ForsterDecomposition ForsterSubspace(const PointSet& x, const ForsterConfig& cfg) {
  const int d = x.d();
  Subspace v = Subspace::Full(d);
  for (int depth = 0; depth <= d; ++depth) {
    const Matrix embed = v.basis().transpose();
    const std::vector<int> members = depth == 0 ? AllIndices(x.n()) : MembersOf(x, v);
    const auto count = static_cast<long long>(members.size());
    if (count == 0 || count * d < static_cast<long long>(x.n()) * v.dim()) {
      throw Error(ErrorKind::kDegenerateInput,
                  "subspace of dimension " + std::to_string(v.dim()) + " holds " +
                      std::to_string(count) + " points");
    }
    Matrix inner(count, v.dim());
    for (long long r = 0; r < count; ++r) {
      inner.row(r) = (embed * x.point(members[static_cast<size_t>(r)])).transpose();
    }
    ForsterConfig level = cfg;
    level.seed = SplitMix64(cfg.seed + static_cast<std::uint64_t>(depth));
    ForsterOutcome outcome = ForsterTransform(PointSet(std::move(inner)), level);
    if (outcome.status == OutcomeStatus::kTransform) {
      ForsterDecomposition out;
      out.v = v;
      out.embed = embed;
      out.transform = outcome.transform;
      out.members = members;
      out.depth = depth;
      out.outcome = std::move(outcome);
      return out;
    }
    v = Orthonormalize(embed.transpose() * outcome.certificate.subspace.basis());
  }
  throw Error(ErrorKind::kDegenerateInput, "recursion deeper than the dimension");
}

}  // namespace forster
