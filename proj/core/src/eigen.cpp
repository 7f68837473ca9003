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

#include "forster/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "forster/rng.hpp"

namespace forster {
namespace {

// Columns whose residual falls to this fraction of the (trace-normalized)
// matrix scale are treated as exactly zero.
constexpr double kDropTol = 1e-15;
// Theory mode stops early once the reconstruction moves less than this,
// relative to |M|_F, between checkpoints.
constexpr double kStationaryTol = 1e-13;
constexpr std::int64_t kCheckpoint = 64;

void CheckSymmetric(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw Error(ErrorKind::kNotSymmetric, "matrix must be square");
  }
  if (!m.allFinite()) throw Error(ErrorKind::kNotSymmetric, "matrix not finite");
  const double scale = std::max(m.cwiseAbs().maxCoeff(),
                                std::numeric_limits<double>::min());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kStructuralTol * scale) {
    throw Error(ErrorKind::kNotSymmetric,
                "asymmetry " + std::to_string(asym / scale) + " exceeds tolerance");
  }
}

// In-place Gram-Schmidt over the columns of w with one reorthogonalization
// pass. A column whose residual is at most `drop` is set to zero; when
// `relative` the threshold scales with the column's own norm.
void GramSchmidt(Matrix& w, double drop, bool relative) {
  const Eigen::Index d = w.cols();
  for (Eigen::Index j = 0; j < d; ++j) {
    const double original = w.col(j).norm();
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) {
        if (w.col(i).squaredNorm() == 0.0) continue;
        w.col(j) -= w.col(i).dot(w.col(j)) * w.col(i);
      }
    }
    const double residual = w.col(j).norm();
    const double threshold = relative ? drop * original : drop;
    if (residual <= threshold) {
      w.col(j).setZero();
    } else {
      w.col(j) /= residual;
    }
  }
}

EigenApprox Assemble(const Matrix& m, const Matrix& q) {
  const double scale = m.norm();
  EigenApprox out;
  out.pairs.reserve(static_cast<size_t>(q.cols()));
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    EigenPair pair;
    pair.direction = q.col(i);
    if (pair.direction.squaredNorm() > 0.0) {
      const double rayleigh = pair.direction.dot(m * pair.direction);
      if (rayleigh < -kStructuralTol * scale) {
        throw Error(ErrorKind::kNotPSD,
                    "Rayleigh quotient " + std::to_string(rayleigh) + " is negative");
      }
      pair.value = std::max(rayleigh, 0.0);
    }
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

}  // namespace

std::string_view ModeName(Mode mode) {
  return mode == Mode::kTheory ? "theory" : "practical";
}

Mode ParseMode(std::string_view name) {
  if (name == "theory") return Mode::kTheory;
  if (name == "practical") return Mode::kPractical;
  throw Error(ErrorKind::kBadSpec, "unknown mode '" + std::string(name) + "'");
}

std::int64_t DefaultRange(int d, double failure_prob) {
  const double n = std::ceil(100.0 * d / failure_prob);
  return std::max<std::int64_t>(static_cast<std::int64_t>(n), 1000);
}

std::int64_t TheoryPower(int d, double accuracy, double failure_prob,
                         double constant) {
  const double t = constant * std::pow(d, 6) / (accuracy * accuracy) *
                   std::log(std::max(d / failure_prob, 2.0));
  const double cap = static_cast<double>(std::numeric_limits<std::int64_t>::max() / 2);
  return static_cast<std::int64_t>(std::min(std::ceil(t), cap));
}

EigenApprox ApproxEigendecomposition(const Matrix& m_in, const EigenConfig& cfg) {
  CheckSymmetric(m_in);
  const Matrix m = 0.5 * (m_in + m_in.transpose());
  const int d = static_cast<int>(m.rows());
  const std::int64_t range =
      cfg.range > 0 ? cfg.range : DefaultRange(d, cfg.failure_prob);

  const double trace = m.trace();
  if (m.cwiseAbs().maxCoeff() == 0.0) {
    EigenApprox zero = Assemble(m, Matrix::Zero(d, d));
    zero.range = range;
    zero.verified = true;
    return zero;
  }
  if (!(trace > 0.0)) throw Error(ErrorKind::kNotPSD, "trace is not positive");
  const Matrix scaled = m / trace;

  Rng rng = Rng::Substream(cfg.seed, 0);
  Matrix q(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) q(i, j) = static_cast<double>(rng.Integer(1, range));
  }
  GramSchmidt(q, kDropTol, /*relative=*/true);

  auto iterate = [&](std::int64_t count) {
    for (std::int64_t s = 0; s < count; ++s) {
      q = scaled * q;
      GramSchmidt(q, kDropTol, /*relative=*/false);
    }
  };
  const std::uint64_t verify_seed = SplitMix64(cfg.seed ^ 0x5bd1e995ULL);

  if (cfg.mode == Mode::kTheory) {
    const std::int64_t nominal =
        cfg.power > 0 ? cfg.power
                      : TheoryPower(d, cfg.accuracy, cfg.failure_prob, cfg.theory_constant);
    std::int64_t done = 0;
    Matrix previous = Reconstruct(Assemble(m, q));
    while (done < nominal) {
      const std::int64_t block = std::min(kCheckpoint, nominal - done);
      iterate(block);
      done += block;
      Matrix current = Reconstruct(Assemble(m, q));
      const bool stationary =
          (current - previous).norm() <= kStationaryTol * m.norm();
      previous = std::move(current);
      if (stationary) break;
    }
    EigenApprox out = Assemble(m, q);
    const VerifyResult check =
        VerifyMultiplicative(m, out, cfg.accuracy, cfg.verify_trials, verify_seed, cfg.verify_floor);
    out.power_used = done;
    out.power_nominal = nominal;
    out.range = range;
    out.worst_ratio = check.worst_ratio;
    out.verified = check.passed;
    return out;
  }

  if (cfg.power > 0) {
    iterate(cfg.power);
    EigenApprox out = Assemble(m, q);
    const VerifyResult check =
        VerifyMultiplicative(m, out, cfg.accuracy, cfg.verify_trials, verify_seed, cfg.verify_floor);
    out.power_used = out.power_nominal = cfg.power;
    out.range = range;
    out.worst_ratio = check.worst_ratio;
    out.verified = check.passed;
    return out;
  }

  std::int64_t done = 0;
  double last_ratio = 0.0;
  for (std::int64_t target = std::max<std::int64_t>(cfg.initial_power, 1);;
       target *= 2) {
    iterate(target - done);
    done = target;
    EigenApprox out = Assemble(m, q);
    const VerifyResult check =
        VerifyMultiplicative(m, out, cfg.accuracy, cfg.verify_trials, verify_seed, cfg.verify_floor);
    last_ratio = check.worst_ratio;
    if (check.passed) {
      out.power_used = out.power_nominal = done;
      out.range = range;
      out.worst_ratio = check.worst_ratio;
      out.verified = true;
      return out;
    }
    if (target >= cfg.max_power) break;
  }
  throw Error(ErrorKind::kEigenFailed,
              "verification failed at power " + std::to_string(done) +
                  " (worst ratio " + std::to_string(last_ratio) + ")");
}

std::vector<EigenPair> SortedDescending(const EigenApprox& e) {
  std::vector<EigenPair> out = e.pairs;
  std::stable_sort(out.begin(), out.end(),
                   [](const EigenPair& a, const EigenPair& b) { return a.value > b.value; });
  return out;
}

Matrix Reconstruct(const EigenApprox& e) {
  if (e.pairs.empty()) return Matrix();
  const Eigen::Index d = e.pairs.front().direction.size();
  Matrix out = Matrix::Zero(d, d);
  for (const EigenPair& p : e.pairs) {
    if (p.value == 0.0) continue;
    out.noalias() += p.value * p.direction * p.direction.transpose();
  }
  return out;
}

VerifyResult VerifyMultiplicative(const Matrix& m, const EigenApprox& e,
                                  double eta, int trials, std::uint64_t seed,
                                  double relative_floor) {
  const int d = static_cast<int>(m.rows());
  const Matrix diff = m - Reconstruct(e);
  // Directions carrying less mass than a dropped column could hide are
  // measured against this floor instead of their own mass.
  const double relative = relative_floor > 0.0 ? relative_floor : std::max(1e-14, kDropTol / eta);
  const double floor =
      std::max(relative * std::abs(m.trace()), std::numeric_limits<double>::min());
  VerifyResult result;

  auto probe = [&](const Vector& raw) {
    const double n = raw.norm();
    if (!(n > 0.0) || !std::isfinite(n)) return;
    const Vector v = raw / n;
    const double mass = std::max(v.dot(m * v), floor);
    result.worst_ratio = std::max(result.worst_ratio, std::abs(v.dot(diff * v)) / mass);
  };

  for (const EigenPair& p : e.pairs) {
    if (p.direction.squaredNorm() > 0.0) probe(p.direction);
  }
  for (int i = 0; i < d; ++i) probe(Vector::Unit(d, i));

  Rng rng = Rng::Substream(seed, 1);
  const Eigen::LDLT<Matrix> shifted(m + floor * Matrix::Identity(d, d));
  for (int t = 0; t < trials; ++t) {
    const Vector u = rng.UnitSphere(d);
    probe(u);
    probe(shifted.solve(u));
  }
  result.passed = result.worst_ratio <= eta;
  return result;
}

}  // namespace forster
