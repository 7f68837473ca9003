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

#include "forster/forster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "forster/rng.hpp"

namespace forster {
namespace {

constexpr double kTheoryConstant = 1e4;
constexpr double kPracticalConstant = 1.0;
constexpr double kPracticalZeta = 1e-6;
constexpr std::int64_t kPracticalMaxIters = 100000;
constexpr std::int64_t kPracticalMaxPower = std::int64_t{1} << 16;
// Practical mode retries a non-descending step with eta divided by this
// factor, down to kFinestEta.
constexpr double kEtaRefinement = 32.0;
constexpr double kFinestEta = 1e-13;

double Pow(double base, int e) { return std::pow(base, e); }

std::int64_t SaturatingCeil(double x) {
  constexpr double cap = static_cast<double>(std::numeric_limits<std::int64_t>::max() / 2);
  return static_cast<std::int64_t>(std::min(std::ceil(x), cap));
}

EigenApprox Decompose(const Matrix& m, const ForsterParams& p, int retries,
                      std::uint64_t seed) {
  EigenConfig cfg;
  cfg.accuracy = p.eta;
  cfg.max_power = kPracticalMaxPower;
  cfg.failure_prob = p.delta;
  cfg.mode = p.mode;
  for (int attempt = 0; attempt < retries; ++attempt) {
    cfg.seed = SplitMix64(seed + static_cast<std::uint64_t>(attempt));
    try {
      EigenApprox e = ApproxEigendecomposition(m, cfg);
      if (p.mode == Mode::kTheory || e.verified) return e;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::kEigenFailed) throw;
    }
  }
  throw Error(ErrorKind::kEigenFailed,
              "no verified decomposition after " + std::to_string(retries) + " seeds");
}

// Sorted directions as columns of an orthonormal d x d matrix; discarded
// (zero) directions are replaced by an orthonormal completion.
Matrix CompletedBasis(const std::vector<EigenPair>& sorted) {
  const Eigen::Index d = sorted.front().direction.size();
  Matrix out(d, d);
  Matrix kept(d, 0);
  for (const EigenPair& p : sorted) {
    if (p.direction.squaredNorm() == 0.0) continue;
    kept.conservativeResize(Eigen::NoChange, kept.cols() + 1);
    kept.col(kept.cols() - 1) = p.direction;
  }
  const Matrix fill = Orthonormalize(kept).Complement().basis();
  Eigen::Index next_fill = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const Vector& q = sorted[static_cast<size_t>(i)].direction;
    out.col(i) = q.squaredNorm() == 0.0 ? Vector(fill.col(next_fill++)) : q;
  }
  return out;
}

Matrix MomentOfRows(const Matrix& f, int normalizer) {
  return f.transpose() * f / static_cast<double>(normalizer);
}

double PotentialOfRows(Matrix f) {
  const int n = static_cast<int>(f.rows());
  f.rowwise().normalize();
  return FrobeniusSquared(MomentOfRows(f, n));
}

struct LineSearchResult {
  double alpha = 0.0;
  double potential = std::numeric_limits<double>::infinity();
  int probes = 0;
};

// Potential of rows f_i + alpha P f_i (renormalized) at alpha0 and, in
// practical mode, at alpha0 * 2^j: upward while improving when alpha0
// already descends, otherwise downward until a descent is found and then
// while improving.
LineSearchResult LineSearch(const Matrix& f, const Matrix& projector, double alpha0,
                            double phi, Mode mode, int budget) {
  const Matrix fp = f * projector;
  LineSearchResult out;
  auto probe = [&](double alpha) {
    ++out.probes;
    return PotentialOfRows(f + alpha * fp);
  };
  out.alpha = alpha0;
  out.potential = probe(alpha0);
  if (mode != Mode::kPractical) return out;
  if (out.potential < phi) {
    for (double alpha = 2.0 * alpha0; out.probes < budget; alpha *= 2.0) {
      const double value = probe(alpha);
      if (!(value < out.potential)) break;
      out.potential = value;
      out.alpha = alpha;
    }
    return out;
  }
  for (double alpha = 0.5 * alpha0; out.probes < budget; alpha *= 0.5) {
    const double value = probe(alpha);
    if (value < out.potential) {
      const bool was_descent = out.potential < phi;
      out.potential = value;
      out.alpha = alpha;
      if (was_descent) continue;
    } else if (out.potential < phi) {
      break;
    }
  }
  return out;
}

}  // namespace

ForsterParams ResolveParams(const ForsterConfig& cfg, int n, int d) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
    throw Error(ErrorKind::kPreconditionViolated, "epsilon must lie in (0, 1)");
  }
  ForsterParams p;
  p.mode = cfg.mode;
  p.epsilon = cfg.epsilon;
  const bool theory = cfg.mode == Mode::kTheory;
  p.constant = cfg.constant > 0.0 ? cfg.constant
                                  : (theory ? kTheoryConstant : kPracticalConstant);
  const double e = cfg.epsilon;
  const double c = p.constant;
  const double dd = d;
  const double nn = n;
  if (cfg.gamma > 0.0) {
    p.gamma = cfg.gamma;
  } else if (theory) {
    p.gamma = e * e / (c * Pow(dd, 4) * nn * nn);
  } else {
    p.gamma = e / (c * dd * dd * nn);
  }
  if (cfg.eta > 0.0) {
    p.eta = cfg.eta;
  } else if (theory) {
    p.eta = Pow(e, 4) / (Pow(c, 3) * Pow(dd, 8) * Pow(nn, 4));
  } else {
    p.eta = std::min(0.05, e / (4.0 * dd * dd));
  }
  const double per_step = Pow(e, 5) / (c * Pow(dd, 10) * Pow(nn, 5));
  if (cfg.zeta > 0.0) {
    p.zeta = cfg.zeta;
  } else {
    p.zeta = theory ? 0.5 * per_step : kPracticalZeta;
  }
  p.delta = cfg.delta;
  p.eigen_retries = cfg.eigen_retries;
  p.line_search_probes = cfg.line_search_probes;
  p.alpha_case1 = e / (64.0 * nn * Pow(dd, 3));
  p.target = 1.0 / dd + e * e / (dd * dd);
  if (cfg.max_iters > 0) {
    p.max_iters = cfg.max_iters;
  } else {
    p.max_iters = theory ? 10 * SaturatingCeil((1.0 - 1.0 / dd) / per_step)
                         : kPracticalMaxIters;
  }
  return p;
}

std::string_view StepCaseName(StepCase c) {
  switch (c) {
    case StepCase::kCaseI: return "case_1";
    case StepCase::kCaseII: return "case_2";
    case StepCase::kCertificate: return "certificate";
  }
  return "unknown";
}

GapSplitResult SplitByGap(const EigenApprox& e, bool require_gap) {
  const int d = e.dim();
  const std::vector<EigenPair> sorted = SortedDescending(e);
  GapSplitResult out;
  for (const EigenPair& p : sorted) out.values.push_back(p.value);
  if (d < 2) {
    out.k = d;
    out.top = Subspace::Full(d);
    out.bottom = Subspace::Zero(d);
    return out;
  }
  out.k = 1;
  out.gap = out.values[0] - out.values[1];
  for (int i = 1; i + 1 < d; ++i) {
    const double diff = out.values[static_cast<size_t>(i)] - out.values[static_cast<size_t>(i) + 1];
    if (diff > out.gap) {
      out.gap = diff;
      out.k = i + 1;
    }
  }
  if (require_gap && out.gap <= kStructuralTol) {
    throw Error(ErrorKind::kAllEqual, "all decomposition values are equal");
  }
  const Matrix basis = CompletedBasis(sorted);
  out.top = Subspace(basis.leftCols(out.k).eval());
  out.bottom = Subspace(basis.rightCols(d - out.k).eval());
  return out;
}

std::vector<int> MembersOf(const PointSet& x, const Subspace& subspace) {
  std::vector<int> out;
  for (int i = 0; i < x.n(); ++i) {
    if (subspace.Contains(x.point(i))) out.push_back(i);
  }
  return out;
}

bool IsDenseSubspace(const PointSet& x, const Subspace& w) {
  const int k = w.dim();
  if (k <= 0 || k >= x.d()) return false;
  const auto count = static_cast<long long>(MembersOf(x, w).size());
  return count * x.d() > static_cast<long long>(x.n()) * k;
}

namespace {

ImproveResult ImproveAtAccuracy(const Transform& a, const PointSet& x,
                                const ForsterParams& params, std::uint64_t seed) {
  const int n = x.n();
  const int d = x.d();
  const Matrix f = NormalizedPoints(a, x);
  const Matrix moment = MomentOfRows(f, n);
  const double phi = FrobeniusSquared(moment);
  if (!(phi > params.target)) {
    throw Error(ErrorKind::kPreconditionViolated,
                "potential " + std::to_string(phi) + " already meets the target");
  }

  ImproveResult result;
  ImproveStep& step = result.step;
  step.potential_before = phi;

  const EigenApprox e = Decompose(moment, params, params.eigen_retries, seed);
  const GapSplitResult split = SplitByGap(e);
  step.k = split.k;
  step.gap = split.gap;

  const Vector in_bottom = (f * split.bottom.basis()).rowwise().norm();
  const Vector in_top = (f * split.top.basis()).rowwise().norm();
  bool case1 = false;
  for (int i = 0; i < n && !case1; ++i) {
    case1 = in_bottom(i) >= params.gamma && in_top(i) >= params.gamma;
  }

  Subspace v;
  double alpha0 = params.alpha_case1;
  if (case1) {
    step.kind = StepCase::kCaseI;
    v = split.bottom;
  } else {
    step.kind = StepCase::kCaseII;
    for (int i = 0; i < n; ++i) {
      if (in_top(i) >= params.gamma) step.big_set.push_back(i);
    }
    Matrix fb(static_cast<Eigen::Index>(step.big_set.size()), d);
    for (size_t r = 0; r < step.big_set.size(); ++r) {
      fb.row(static_cast<Eigen::Index>(r)) = f.row(step.big_set[r]);
    }
    const EigenApprox eb =
        Decompose(MomentOfRows(fb, n), params, params.eigen_retries, SplitMix64(seed ^ 0xb16));
    const Matrix basis = CompletedBasis(SortedDescending(eb));
    v = Subspace(basis.rightCols(d - split.k).eval());

    const Vector in_v = (f * v.basis()).rowwise().norm();
    double beta = 0.0;
    for (int i : step.big_set) beta = std::max(beta, in_v(i));
    step.beta = beta;

    if (beta < kMembershipTol) {
      Matrix member_points(d, 0);
      for (int i = 0; i < n; ++i) {
        if (in_v(i) > kMembershipTol) continue;
        member_points.conservativeResize(Eigen::NoChange, member_points.cols() + 1);
        member_points.col(member_points.cols() - 1) = x.point(i).normalized();
      }
      const Subspace w = Orthonormalize(member_points);
      if (IsDenseSubspace(x, w)) {
        step.kind = StepCase::kCertificate;
        step.potential_after = phi;
        result.is_certificate = true;
        result.certificate = {w, MembersOf(x, w)};
        return result;
      }
      beta = std::max(beta, kMembershipTol);
    }
    alpha0 = params.epsilon / (3.0 * beta * d * d * n) - 1.0;
    if (!(alpha0 > 0.0)) alpha0 = params.alpha_case1;
  }
  step.alpha_nominal = alpha0;

  LineSearchResult best =
      LineSearch(f, v.Projector(), alpha0, phi, params.mode, params.line_search_probes);
  step.probes = best.probes;
  step.v_dim = v.dim();
  if (params.mode == Mode::kPractical) {
    // Other splits of the same decomposition; the best measured decrease wins.
    const Matrix basis = CompletedBasis(SortedDescending(e));
    for (int k = 1; k < d; ++k) {
      if (k == split.k && step.kind == StepCase::kCaseI) continue;
      const Matrix bottom = basis.rightCols(d - k);
      const LineSearchResult other =
          LineSearch(f, bottom * bottom.transpose(), params.alpha_case1, phi,
                     params.mode, params.line_search_probes);
      step.probes += other.probes;
      if (other.potential < best.potential) {
        best = other;
        v = Subspace(Matrix(bottom));
        step.v_dim = d - k;
      }
    }
  }
  const double best_alpha = best.alpha;

  const Matrix id = Matrix::Identity(d, d);
  const Matrix next = NormalizeScale((id + best_alpha * v.Projector()) * a.matrix());
  result.next = Transform(next);
  step.alpha = best_alpha;
  step.potential_after = Potential(result.next, x);
  if (!(step.potential_after < phi)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << StepCaseName(step.kind) << " step did not decrease the potential: before "
        << phi << ", after " << step.potential_after << ", alpha " << best_alpha
        << ", k " << step.k << ", gap " << step.gap << ", beta " << step.beta
        << ", probes " << step.probes;
    throw Error(ErrorKind::kNoDescent, msg.str());
  }
  return result;
}

// Orders the points by their distance from `side` in the normalized image
// and tests the span of every prefix just before its rank grows.
std::optional<Certificate> DensePrefix(const PointSet& x, const Matrix& f,
                                       const Matrix& side) {
  const int n = x.n();
  const int d = x.d();
  const Vector off = (f - f * side * side.transpose()).rowwise().norm();
  std::vector<int> order = AllIndices(n);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return off(i) < off(j); });
  Matrix basis(d, 0);
  auto test = [&]() -> std::optional<Certificate> {
    if (basis.cols() == 0 || basis.cols() >= d) return std::nullopt;
    const Subspace w(basis);
    if (!IsDenseSubspace(x, w)) return std::nullopt;
    return Certificate{w, MembersOf(x, w)};
  };
  for (int i : order) {
    const Vector p = x.point(i).normalized();
    Vector r = p - basis * (basis.transpose() * p);
    r -= basis * (basis.transpose() * r);
    if (r.norm() <= kMembershipTol) continue;
    if (auto found = test()) return found;
    if (basis.cols() + 1 >= d) return std::nullopt;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = r.normalized();
  }
  return test();
}

// Fallback for runs that stall next to a degenerate limit: the points of a
// dense subspace collapse toward one side of some eigen split. Every
// candidate is checked by direct count, so the search cannot return a false
// certificate.
std::optional<Certificate> SearchCertificate(const Transform& a, const PointSet& x,
                                             const ForsterParams& params,
                                             std::uint64_t seed) {
  const int d = x.d();
  const Matrix f = NormalizedPoints(a, x);
  const EigenApprox e = Decompose(MomentOfRows(f, x.n()), params, params.eigen_retries, seed);
  const Matrix basis = CompletedBasis(SortedDescending(e));
  for (int k = 1; k < d; ++k) {
    if (auto c = DensePrefix(x, f, basis.leftCols(k))) return c;
    if (auto c = DensePrefix(x, f, basis.rightCols(d - k))) return c;
  }
  return std::nullopt;
}

}  // namespace

ImproveResult ImproveTransform(const Transform& a, const PointSet& x,
                               const ForsterParams& params, std::uint64_t seed) {
  try {
    return ImproveAtAccuracy(a, x, params, seed);
  } catch (const Error& e) {
    if (params.mode != Mode::kPractical || e.kind() != ErrorKind::kNoDescent) throw;
    ForsterParams attempt = params;
    while (attempt.eta / kEtaRefinement >= kFinestEta) {
      attempt.eta /= kEtaRefinement;
      try {
        return ImproveAtAccuracy(a, x, attempt, seed);
      } catch (const Error& retry) {
        if (retry.kind() != ErrorKind::kNoDescent) break;
      }
    }
    if (auto found = SearchCertificate(a, x, params, seed)) {
      ImproveResult result;
      result.is_certificate = true;
      result.certificate = *std::move(found);
      result.step.kind = StepCase::kCertificate;
      result.step.potential_before = result.step.potential_after = Potential(a, x);
      return result;
    }
    throw;
  }
}

ForsterOutcome ForsterTransform(const PointSet& x, const ForsterConfig& cfg) {
  return ForsterTransform(x, cfg, Transform::Identity(x.d()));
}

ForsterOutcome ForsterTransform(const PointSet& x, const ForsterConfig& cfg,
                                const Transform& start) {
  if (start.dim() != x.d()) throw Error(ErrorKind::kDegenerateInput, "dimension mismatch");
  ForsterOutcome out;
  out.params = ResolveParams(cfg, x.n(), x.d());
  const ForsterParams& p = out.params;

  RoundConfig round_cfg;
  round_cfg.zeta = p.zeta;
  round_cfg.eigen.seed = SplitMix64(cfg.seed ^ 0x70d);

  Transform a = start;
  double phi = Potential(a, x);
  out.potential_trace.push_back(phi);
  while (phi > p.target) {
    if (out.iterations >= p.max_iters) {
      throw IterationCapError("no convergence after " + std::to_string(out.iterations) +
                                  " iterations; potential " + std::to_string(phi),
                              out.potential_trace);
    }
    const std::uint64_t step_seed =
        SplitMix64(cfg.seed + static_cast<std::uint64_t>(out.iterations));
    ImproveResult r = ImproveTransform(a, x, p, step_seed);
    if (r.is_certificate) {
      out.steps.push_back(std::move(r.step));
      out.status = OutcomeStatus::kDenseSubspace;
      out.certificate = std::move(r.certificate);
      out.transform = a;
      out.final_potential = phi;
      return out;
    }
    Transform next = r.next;
    double next_phi = r.step.potential_after;
    if (cfg.round_between_steps) {
      try {
        RoundResult rounded = RoundTransform(next, x, round_cfg);
        const double rounded_phi = Potential(rounded.transform, x);
        if (rounded_phi < phi) {
          next = rounded.transform;
          next_phi = rounded_phi;
          ++out.roundings_applied;
        }
      } catch (const Error& e) {
        switch (e.kind()) {
          case ErrorKind::kRoundingOverflow:
          case ErrorKind::kDoesNotSpan:
          case ErrorKind::kGapTooSmall:
          case ErrorKind::kMaxRoundsExceeded:
          case ErrorKind::kEigenFailed:
          case ErrorKind::kSingularTransform:
            break;
          default:
            throw;
        }
      }
    }
    r.step.potential_after = next_phi;
    out.steps.push_back(std::move(r.step));
    a = std::move(next);
    phi = next_phi;
    out.potential_trace.push_back(phi);
    ++out.iterations;
  }
  out.status = OutcomeStatus::kTransform;
  out.transform = a;
  out.final_potential = phi;
  return out;
}

}  // namespace forster
