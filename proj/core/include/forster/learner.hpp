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

#ifndef FORSTER_LEARNER_HPP_
#define FORSTER_LEARNER_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "forster/decomposition.hpp"
#include "forster/forster.hpp"
#include "forster/linalg.hpp"
#include "forster/rng.hpp"

namespace forster {

// (x, y) -> ((x, -1), y): thresholded halfspaces become homogeneous.
PointSet Homogenize(const PointSet& s);
// Raw rows may include the origin, whose lift (0, ..., 0, -1) is nonzero.
PointSet Homogenize(const Matrix& points, std::vector<int> labels);
Vector Homogenize(const Vector& x);

struct PerceptronResult {
  Vector weight;
  int start = 0;                  // Index of the winning initialization.
  std::int64_t updates = 0;       // Updates made by the winning start.
  std::int64_t total_updates = 0; // Across every start that was run.
  std::vector<double> norm_trace; // |v|^2 before each update of the winner.
  double initial_scale = 0.0;     // |v_0| = 4 sqrt(d) / gamma.
};

// Starts from +-(4 sqrt(d)/gamma) e_j in the order +e_0, -e_0, +e_1, ...
// and returns the first start that reaches a vector with no high-margin
// mistakes within floor(|v_0|^2 / 2) + 1 updates.
PerceptronResult MarginPerceptron(const PointSet& s, double gamma);

class PartialClassifier {
 public:
  PartialClassifier() = default;
  PartialClassifier(Subspace region, Matrix embed, Transform map, Vector weight,
                    double threshold);

  // Image of x in R^{dim V}: map * embed * x.
  Vector Lift(const Vector& x) const;
  // +1 / -1 on covered points, 0 elsewhere.
  int Predict(const Vector& x) const;
  bool Covers(const Vector& x) const { return Predict(x) != 0; }

  const Subspace& region() const { return region_; }
  const Matrix& embed() const { return embed_; }
  const Transform& map() const { return map_; }
  const Vector& weight() const { return weight_; }
  double threshold() const { return threshold_; }

 private:
  Subspace region_;
  Matrix embed_;
  Transform map_;
  Vector weight_;
  double threshold_ = 0.0;
};

struct PartialFit {
  PartialClassifier classifier;
  ForsterDecomposition decomposition;
  PerceptronResult perceptron;
};

// Forster decomposition at epsilon = 1/2 followed by the margin perceptron
// at 1/(2 sqrt(dim V)) on the lifted points.
PartialFit FitPartialClassifier(const PointSet& s, const ForsterConfig& cfg);

class DecisionList {
 public:
  DecisionList() = default;
  explicit DecisionList(int ambient_d) : ambient_d_(ambient_d) {}

  int ambient_d() const { return ambient_d_; }
  const std::vector<PartialClassifier>& stages() const { return stages_; }
  void Append(PartialClassifier stage) { stages_.push_back(std::move(stage)); }

  // First stage covering x decides; 0 if none does.
  int Predict(const Vector& x) const;

 private:
  int ambient_d_ = 0;
  std::vector<PartialClassifier> stages_;
};

struct Evaluation {
  double error_rate = 0.0;
  double abstain_rate = 0.0;
  double coverage_mistake_rate = 0.0;  // Mistakes among non-abstentions.
  std::int64_t count = 0;
};

Evaluation Evaluate(const DecisionList& f, const PointSet& t);

// Draws `count` labeled examples.
using Oracle = std::function<PointSet(std::int64_t count, Rng& rng)>;

struct LearnConfig {
  double epsilon = 0.1;
  double delta = 0.1;
  Mode mode = Mode::kPractical;
  double constant = 10.0;           // C in the round count and sample size.
  std::int64_t samples_per_round = 0;  // 0 = C d^4 log(d/(eps delta)) / eps^2.
  int max_rounds = 0;               // 0 = ceil(C sqrt(d) log(1/eps)).
  std::uint64_t seed = 0;
  ForsterConfig forster;            // epsilon is forced to 1/2.
};

struct LearnRound {
  std::int64_t drawn = 0;
  std::int64_t uncovered = 0;
  int subspace_dim = 0;
  double train_coverage = 0.0;  // Fraction of the uncovered set newly covered.
  std::int64_t perceptron_updates = 0;
};

struct LearnReport {
  DecisionList model;
  std::vector<LearnRound> rounds;
  int round_budget = 0;
  std::int64_t samples_per_round = 0;
};

LearnReport LearnHalfspace(const Oracle& oracle, int d, const LearnConfig& cfg);

// Uniform resampling with replacement from a fixed labeled set.
Oracle EmpiricalOracle(PointSet data);

}  // namespace forster

#endif  // FORSTER_LEARNER_HPP_
