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

#include "forster/learner.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace forster {
namespace {

constexpr double kInitialScale = 4.0;

int Sign(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

Matrix Lifted(const Matrix& points) {
  Matrix lifted(points.rows(), points.cols() + 1);
  lifted.leftCols(points.cols()) = points;
  lifted.col(points.cols()).setConstant(-1.0);
  return lifted;
}

}  // namespace

PointSet Homogenize(const PointSet& s) {
  if (s.labeled()) return PointSet(Lifted(s.points()), s.labels());
  return PointSet(Lifted(s.points()));
}

PointSet Homogenize(const Matrix& points, std::vector<int> labels) {
  if (labels.empty()) return PointSet(Lifted(points));
  return PointSet(Lifted(points), std::move(labels));
}

Vector Homogenize(const Vector& x) {
  Vector out(x.size() + 1);
  out << x, -1.0;
  return out;
}

PerceptronResult MarginPerceptron(const PointSet& s, double gamma) {
  if (!s.labeled()) throw Error(ErrorKind::kDegenerateInput, "perceptron needs labels");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorKind::kPreconditionViolated, "margin must lie in (0, 1)");
  }
  const int n = s.n();
  const int d = s.d();
  const Matrix& x = s.points();
  const Vector norms = x.rowwise().norm();
  Matrix unit_scaled(n, d);
  for (int i = 0; i < n; ++i) {
    unit_scaled.row(i) = std::ldexp(1.0, -std::ilogb(norms(i))) * x.row(i);
  }

  PerceptronResult out;
  out.initial_scale = kInitialScale * std::sqrt(static_cast<double>(d)) / gamma;
  const auto budget = static_cast<std::int64_t>(
      std::floor(out.initial_scale * out.initial_scale / 2.0)) + 1;

  for (int start = 0; start < 2 * d; ++start) {
    Vector v = Vector::Zero(d);
    v(start / 2) = start % 2 == 0 ? out.initial_scale : -out.initial_scale;
    std::vector<double> trace;
    std::int64_t updates = 0;
    bool failed = false;
    int pos = 0;
    int clean = 0;
    while (clean < n) {
      const int i = pos;
      pos = (pos + 1) % n;
      const double dot = v.dot(x.row(i));
      const int y = s.label(i);
      if (std::abs(dot) >= gamma * v.norm() * norms(i) && Sign(dot) != y) {
        if (updates == budget) {
          failed = true;
          break;
        }
        trace.push_back(v.squaredNorm());
        v += y * unit_scaled.row(i).transpose();
        ++updates;
        clean = 0;
      } else {
        ++clean;
      }
    }
    out.total_updates += updates;
    if (!failed) {
      out.weight = std::move(v);
      out.start = start;
      out.updates = updates;
      out.norm_trace = std::move(trace);
      return out;
    }
  }
  throw Error(ErrorKind::kNotSeparable,
              "every start exceeded " + std::to_string(budget) + " updates");
}

PartialClassifier::PartialClassifier(Subspace region, Matrix embed, Transform map,
                                     Vector weight, double threshold)
    : region_(std::move(region)),
      embed_(std::move(embed)),
      map_(std::move(map)),
      weight_(std::move(weight)),
      threshold_(threshold) {
  if (!(weight_.norm() > 0.0)) {
    throw Error(ErrorKind::kDegenerateInput, "classifier weight is zero");
  }
}

Vector PartialClassifier::Lift(const Vector& x) const {
  return map_.matrix() * (embed_ * x);
}

int PartialClassifier::Predict(const Vector& x) const {
  if (!region_.Contains(x)) return 0;
  const Vector z = Lift(x);
  const double zn = z.norm();
  if (!(zn > 0.0)) return 0;
  const double margin = weight_.dot(z);
  if (std::abs(margin) >= threshold_ * weight_.norm() * zn) return Sign(margin);
  return 0;
}

PartialFit FitPartialClassifier(const PointSet& s, const ForsterConfig& cfg) {
  if (!s.labeled()) throw Error(ErrorKind::kDegenerateInput, "training set needs labels");
  ForsterConfig half = cfg;
  half.epsilon = 0.5;
  PartialFit fit;
  fit.decomposition = ForsterSubspace(PointSet(s.points()), half);
  const ForsterDecomposition& dec = fit.decomposition;
  const int k = dec.v.dim();

  Matrix lifted(static_cast<Eigen::Index>(dec.members.size()), k);
  std::vector<int> labels;
  labels.reserve(dec.members.size());
  for (size_t r = 0; r < dec.members.size(); ++r) {
    const int i = dec.members[r];
    lifted.row(static_cast<Eigen::Index>(r)) = dec.Map(s.point(i)).transpose();
    labels.push_back(s.label(i));
  }
  const double threshold = 1.0 / (2.0 * std::sqrt(static_cast<double>(k)));
  fit.perceptron = MarginPerceptron(PointSet(std::move(lifted), std::move(labels)), threshold);
  fit.classifier = PartialClassifier(dec.v, dec.embed, dec.transform,
                                     fit.perceptron.weight, threshold);
  return fit;
}

int DecisionList::Predict(const Vector& x) const {
  for (const PartialClassifier& stage : stages_) {
    const int y = stage.Predict(x);
    if (y != 0) return y;
  }
  return 0;
}

Evaluation Evaluate(const DecisionList& f, const PointSet& t) {
  Evaluation out;
  out.count = t.n();
  if (t.n() == 0) return out;
  std::int64_t errors = 0;
  std::int64_t abstains = 0;
  for (int i = 0; i < t.n(); ++i) {
    const int y = f.Predict(t.point(i));
    if (y == 0) {
      ++abstains;
    } else if (y != t.label(i)) {
      ++errors;
    }
  }
  const double n = static_cast<double>(t.n());
  out.error_rate = static_cast<double>(errors) / n;
  out.abstain_rate = static_cast<double>(abstains) / n;
  const std::int64_t decided = t.n() - abstains;
  out.coverage_mistake_rate =
      decided > 0 ? static_cast<double>(errors) / static_cast<double>(decided) : 0.0;
  return out;
}

LearnReport LearnHalfspace(const Oracle& oracle, int d, const LearnConfig& cfg) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) || !(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw Error(ErrorKind::kPreconditionViolated, "epsilon and delta must lie in (0, 1)");
  }
  if (cfg.mode == Mode::kTheory && !(cfg.epsilon < 1.0 / (20.0 * d))) {
    throw Error(ErrorKind::kPreconditionViolated, "theory mode needs epsilon < 1/(20 d)");
  }
  LearnReport report;
  const double e = cfg.epsilon;
  report.samples_per_round =
      cfg.samples_per_round > 0
          ? cfg.samples_per_round
          : static_cast<std::int64_t>(std::ceil(cfg.constant * std::pow(d, 4) *
                                                std::log(d / (e * cfg.delta)) / (e * e)));
  report.round_budget =
      cfg.max_rounds > 0
          ? cfg.max_rounds
          : static_cast<int>(std::ceil(cfg.constant * std::sqrt(d) * std::log(1.0 / e)));
  report.model = DecisionList(d);

  Rng rng = Rng::Substream(cfg.seed, 0);
  const double stop = e * static_cast<double>(report.samples_per_round) / 4.0;
  for (int round = 0;; ++round) {
    const PointSet batch = oracle(report.samples_per_round, rng);
    if (batch.d() != d || !batch.labeled()) {
      throw Error(ErrorKind::kDegenerateInput, "oracle returned malformed samples");
    }
    std::vector<int> uncovered;
    for (int i = 0; i < batch.n(); ++i) {
      if (report.model.Predict(batch.point(i)) == 0) uncovered.push_back(i);
    }
    if (static_cast<double>(uncovered.size()) < stop) return report;
    if (round == report.round_budget) {
      throw Error(ErrorKind::kRoundBudgetExceeded,
                  std::to_string(uncovered.size()) + " of " + std::to_string(batch.n()) +
                      " samples still uncovered after " + std::to_string(round) + " rounds");
    }
    const PointSet train = batch.Subset(uncovered);
    ForsterConfig fc = cfg.forster;
    fc.seed = SplitMix64(cfg.seed + static_cast<std::uint64_t>(round) + 1);
    PartialFit fit = FitPartialClassifier(train, fc);

    LearnRound record;
    record.drawn = batch.n();
    record.uncovered = train.n();
    record.subspace_dim = fit.classifier.region().dim();
    record.perceptron_updates = fit.perceptron.total_updates;
    std::int64_t covered = 0;
    for (int i = 0; i < train.n(); ++i) {
      if (fit.classifier.Covers(train.point(i))) ++covered;
    }
    record.train_coverage = static_cast<double>(covered) / train.n();
    report.rounds.push_back(record);
    report.model.Append(std::move(fit.classifier));
  }
}

Oracle EmpiricalOracle(PointSet data) {
  return [data = std::move(data)](std::int64_t count, Rng& rng) {
    std::vector<int> picks(static_cast<size_t>(count));
    for (auto& p : picks) p = static_cast<int>(rng.Integer(0, data.n() - 1));
    return data.Subset(picks);
  };
}

}  // namespace forster
