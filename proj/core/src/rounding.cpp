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

#include "forster/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "forster/rng.hpp"

namespace forster {
namespace {

constexpr double kMaxExactInteger = 9007199254740992.0;  // 2^53
// Rayleigh values below this fraction of the top one are read from the
// inverse Gram matrix instead.
constexpr double kGramRelativeFloor = 1e-8;
constexpr std::int64_t kPracticalMaxPower = std::int64_t{1} << 16;
// Interior re-rounding resolution relative to zeta.
constexpr double kInteriorResolution = 1.0 / 1024.0;

EigenConfig WithSeed(EigenConfig cfg, std::uint64_t salt) {
  cfg.seed = SplitMix64(cfg.seed ^ salt);
  if (cfg.mode == Mode::kPractical) cfg.max_power = std::min(cfg.max_power, kPracticalMaxPower);
  return cfg;
}

// The Gram route only supplies values above kGramRelativeFloor; the inverse
// route covers the rest, so A^T A is verified down to just below that level.
// Its lower spectrum is lost to roundoff when A is badly conditioned.
EigenConfig GramConfig(const EigenConfig& cfg) {
  EigenConfig out = WithSeed(cfg, 0x11);
  if (out.verify_floor == 0.0) out.verify_floor = kGramRelativeFloor * 1e-2;
  return out;
}

Matrix Columns(const std::vector<EigenPair>& pairs, int from, int to) {
  const Eigen::Index d = pairs.front().direction.size();
  Matrix out(d, to - from);
  for (int i = from; i < to; ++i) out.col(i - from) = pairs[static_cast<size_t>(i)].direction;
  return out;
}

double TopValueUpper(const Matrix& psd, const EigenConfig& cfg) {
  const EigenApprox e = ApproxEigendecomposition(psd, cfg);
  double top = 0.0;
  for (const EigenPair& p : e.pairs) top = std::max(top, p.value);
  return top / (1.0 - cfg.accuracy);
}

int MagnitudeExponent(const PointSet& x) {
  const double m = x.points().cwiseAbs().maxCoeff();
  return m <= 1.0 ? 0 : static_cast<int>(std::ceil(std::log2(m)));
}

}  // namespace

SingularEstimates EstimateSingular(const Matrix& a, const EigenConfig& cfg) {
  const int d = static_cast<int>(a.rows());
  const Eigen::PartialPivLU<Matrix> lu(a);
  const Matrix inv = lu.inverse();
  if (!inv.allFinite()) throw Error(ErrorKind::kSingularTransform, "matrix is singular");

  const std::vector<EigenPair> gram =
      SortedDescending(ApproxEigendecomposition(a.transpose() * a, GramConfig(cfg)));
  std::vector<EigenPair> inverse =
      SortedDescending(ApproxEigendecomposition(inv * inv.transpose(), WithSeed(cfg, 0x22)));
  // Largest 1/sigma^2 first means smallest sigma first; flip to match.
  std::reverse(inverse.begin(), inverse.end());

  SingularEstimates out;
  out.sigma.resize(d);
  const double top = gram.front().value;
  for (int i = 0; i < d; ++i) {
    const double from_gram = gram[static_cast<size_t>(i)].value;
    const double from_inverse = inverse[static_cast<size_t>(i)].value;
    if (from_gram > 0.0 && from_gram >= kGramRelativeFloor * top) {
      out.sigma(i) = std::sqrt(from_gram);
    } else if (from_inverse > 0.0) {
      out.sigma(i) = 1.0 / std::sqrt(from_inverse);
    } else {
      throw Error(ErrorKind::kSingularTransform, "singular value estimate failed");
    }
  }
  out.directions = Columns(gram, 0, d);
  out.inverse_directions = Columns(inverse, 0, d);
  out.sigma_max_upper = std::sqrt(top / (1.0 - cfg.accuracy));
  const double inv_top = inverse.back().value;
  out.sigma_min_lower = inv_top > 0.0 ? std::sqrt((1.0 - cfg.accuracy) / inv_top)
                                      : out.sigma(d - 1) * std::sqrt(1.0 - cfg.accuracy);
  out.kappa = out.sigma_max_upper / out.sigma_min_lower;
  return out;
}

SingularExtremes EstimateExtremes(const Matrix& b, const EigenConfig& cfg) {
  SingularExtremes out;
  const Eigen::Index k = b.cols();
  if (k == 0) {
    out.min_lower = std::numeric_limits<double>::infinity();
    return out;
  }
  const Eigen::HouseholderQR<Matrix> qr(b);
  const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  out.max_upper = std::sqrt(TopValueUpper(r.transpose() * r, WithSeed(cfg, 0x33)));
  const Matrix r_inv =
      r.triangularView<Eigen::Upper>().solve(Matrix::Identity(k, k));
  if (!r_inv.allFinite()) throw Error(ErrorKind::kSingularTransform, "rank deficient block");
  const double inv_top = TopValueUpper(r_inv * r_inv.transpose(), WithSeed(cfg, 0x44));
  out.min_lower = 1.0 / std::sqrt(inv_top);
  return out;
}

SetEigenProfile EigendecompositionFromSet(const Transform& a, const PointSet& x) {
  const int d = x.d();
  Matrix chosen(d, 0);
  SetEigenProfile out;
  for (int stage = 0; stage < d; ++stage) {
    int best = -1;
    double best_value = std::numeric_limits<double>::infinity();
    Vector best_residual;
    for (int i = 0; i < x.n(); ++i) {
      const Vector xi = x.point(i).normalized();
      const Vector residual = xi - chosen * (chosen.transpose() * xi);
      const double rn = residual.norm();
      if (rn <= kMembershipTol) continue;
      const double value = (a.matrix() * residual).norm() / rn;
      if (value < best_value) {
        best = i;
        best_value = value;
        best_residual = residual / rn;
      }
    }
    if (best < 0) {
      throw Error(ErrorKind::kDoesNotSpan,
                  "points span only " + std::to_string(stage) + " of " +
                      std::to_string(d) + " dimensions");
    }
    out.indices.push_back(best);
    out.values.push_back(best_value);
    chosen.conservativeResize(Eigen::NoChange, stage + 1);
    chosen.col(stage) = best_residual;
  }
  return out;
}

GapSplit SingularGapSplit(const Transform& a, const EigenConfig& cfg) {
  const int d = a.dim();
  GapSplit out;
  out.estimates = EstimateSingular(a.matrix(), cfg);
  if (d == 1) {
    out.small = Subspace::Zero(1);
    out.large_count = 1;
    return out;
  }
  const Vector& s = out.estimates.sigma;
  int split = 0;
  double best = 0.0;
  for (int i = 0; i + 1 < d; ++i) {
    const double ratio = s(i) / s(i + 1);
    if (ratio > best) {
      best = ratio;
      split = i;
    }
  }
  const double eta = cfg.accuracy;
  out.gap = best * std::sqrt((1.0 - eta) / (1.0 + eta));
  out.large_count = split + 1;

  // Each route resolves the split subspace to roughly machine precision
  // times the square of its own dynamic range.
  const double err_gram = std::pow(s(0) / s(split), 2);
  const double err_inverse = std::pow(s(split + 1) / s(d - 1), 2);
  if (err_inverse < err_gram) {
    out.small = Orthonormalize(
        out.estimates.inverse_directions.rightCols(d - split - 1));
  } else {
    out.small = Orthonormalize(out.estimates.directions.leftCols(split + 1)).Complement();
  }
  return out;
}

ReduceStep ReduceConditionStep(const Transform& a, const PointSet& x,
                               const RoundConfig& cfg) {
  const int d = a.dim();
  const GapSplit split = SingularGapSplit(a, cfg.eigen);
  const Subspace v = split.small;
  const Subspace v_perp = v.Complement();
  const SetEigenProfile profile = EigendecompositionFromSet(a, x);

  const double v_max = EstimateExtremes(a.matrix() * v.basis(), cfg.eigen).max_upper;
  const double v_perp_min =
      EstimateExtremes(a.matrix() * v_perp.basis(), cfg.eigen).min_lower;

  int m = -1;
  for (int i = 0; i < d; ++i) {
    const double bar = std::pow(split.gap, (i + 1.0) / d) * v_max / d;
    if (profile.values[static_cast<size_t>(i)] >= bar) {
      m = i;
      break;
    }
  }
  if (m < 0) throw Error(ErrorKind::kGapTooSmall, "no admissible prefix of the set profile");

  Matrix w_points(d, m);
  for (int i = 0; i < m; ++i) {
    w_points.col(i) = x.point(profile.indices[static_cast<size_t>(i)]).normalized();
  }
  const Subspace w = Orthonormalize(w_points);
  const double w_max = EstimateExtremes(a.matrix() * w.basis(), cfg.eigen).max_upper;
  const double g = std::min(profile.values[static_cast<size_t>(m)], v_perp_min) /
                   std::max(w_max, v_max);
  if (!(g > 10.0)) {
    throw Error(ErrorKind::kGapTooSmall, "g = " + std::to_string(g) + " is not above 10");
  }

  double delta = cfg.delta_rescale;
  if (delta <= 0.0) {
    delta = std::max(8.0 / g, std::min(std::ldexp(1.0, -MagnitudeExponent(x)), 0.5));
  } else if (delta < 8.0 / g || delta >= 1.0) {
    throw Error(ErrorKind::kPreconditionViolated,
                "delta must lie in [8/g, 1); 8/g = " + std::to_string(8.0 / g));
  }

  const Matrix w_proj = w.Projector();
  const Matrix id = Matrix::Identity(d, d);
  const Subspace r = Orthonormalize((id - w_proj) * v_perp.basis());
  const Matrix t = id - (1.0 - delta) * r.Projector();

  ReduceStep step;
  step.before = a.matrix();
  step.after = a.matrix() * t;
  step.v = v;
  step.w = w;
  step.r = r;
  step.m = m;
  step.gap = split.gap;
  step.g = g;
  step.delta = delta;
  step.rho = 1.0;
  for (int i = 0; i < x.n(); ++i) {
    const Vector xi = x.point(i).normalized();
    if (w.Contains(xi)) continue;
    step.rho = std::min(step.rho, (xi - w_proj * xi).norm());
  }
  const Transform after(step.after);
  step.drift = MaxDrift(a, after, x);
  step.drift_bound = 16.0 / ((g - 1.0) * step.rho * delta);
  step.kappa_before = split.estimates.kappa;
  step.kappa_after = EstimateSingular(step.after, cfg.eigen).kappa;
  return step;
}

RoundResult RoundTransform(const Transform& a, const PointSet& x,
                           const RoundConfig& cfg) {
  const int d = a.dim();
  if (x.d() != d) throw Error(ErrorKind::kDegenerateInput, "dimension mismatch");
  if (!(cfg.zeta > 0.0 && cfg.zeta < 1.0)) {
    throw Error(ErrorKind::kPreconditionViolated, "zeta must lie in (0, 1)");
  }
  const double threshold =
      cfg.threshold > 0.0 ? cfg.threshold : std::pow(d / cfg.zeta, 6);

  RoundResult out;
  Matrix current = NormalizeScale(a.matrix());
  SingularEstimates est = EstimateSingular(current, cfg.eigen);
  out.kappa_before = est.kappa;

  while (est.kappa >= threshold) {
    if (out.rounds >= cfg.max_rounds) {
      throw Error(ErrorKind::kMaxRoundsExceeded,
                  "condition estimate " + std::to_string(est.kappa) + " after " +
                      std::to_string(out.rounds) + " rounds");
    }
    try {
      current = RoundEntries(current, est.sigma_min_lower,
                             cfg.zeta * kInteriorResolution);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kRoundingOverflow) throw;
      current = NormalizeScale(current);
    }
    ReduceStep step = ReduceConditionStep(Transform(current), x, cfg);
    current = NormalizeScale(step.after);
    out.steps.push_back(std::move(step));
    ++out.rounds;
    est = EstimateSingular(current, cfg.eigen);
  }

  out.scale = d / (est.sigma_min_lower * (cfg.zeta / 4.0));
  out.transform = Transform(RoundEntries(current, est.sigma_min_lower, cfg.zeta / 4.0));
  out.kappa_after = EstimateSingular(out.transform.matrix(), cfg.eigen).kappa;
  out.max_drift = MaxDrift(a, out.transform, x);
  return out;
}

Matrix RoundEntries(const Matrix& a, double sigma_min_lower, double zeta) {
  const double scale = static_cast<double>(a.rows()) / (sigma_min_lower * zeta);
  const Matrix scaled = scale * a;
  if (!scaled.allFinite() || scaled.cwiseAbs().maxCoeff() > kMaxExactInteger) {
    throw Error(ErrorKind::kRoundingOverflow, "rounded entries would exceed 2^53");
  }
  return scaled.array().round().matrix();
}

double MaxDrift(const Transform& a, const Transform& b, const PointSet& x) {
  double worst = 0.0;
  for (int i = 0; i < x.n(); ++i) {
    const Vector p = x.point(i);
    worst = std::max(worst, (NormalizeMap(a, p) - NormalizeMap(b, p)).norm());
  }
  return worst;
}

Matrix NormalizeScale(const Matrix& a) {
  const double m = a.cwiseAbs().maxCoeff();
  if (!(m > 0.0) || !std::isfinite(m)) return a;
  return std::ldexp(1.0, -std::ilogb(m)) * a;
}

}  // namespace forster
