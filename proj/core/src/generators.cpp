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

#include "forster/generators.hpp"

#include <cmath>
#include <stdexcept>

#include "forster/errors.hpp"

namespace forster {
namespace {

constexpr std::int64_t kMaxRejections = 100000000;

double ParseNumber(std::string_view text, std::string_view spec) {
  try {
    size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::kBadSpec, "bad number in spec '" + std::string(spec) + "'");
}

// Splits "head:rest" at the first colon.
std::pair<std::string_view, std::string_view> Head(std::string_view s) {
  const size_t colon = s.find(':');
  if (colon == std::string_view::npos) return {s, {}};
  return {s.substr(0, colon), s.substr(colon + 1)};
}

}  // namespace

PointSet SphereUniform(int n, int d, Rng& rng) {
  Matrix p(n, d);
  for (int i = 0; i < n; ++i) p.row(i) = rng.UnitSphere(d).transpose();
  return PointSet(std::move(p));
}

PointSet GaussianPoints(int n, int d, Rng& rng) {
  Matrix p(n, d);
  for (int i = 0; i < n; ++i) {
    Vector g = rng.GaussianVector(d);
    while (g.norm() <= 1e-12) g = rng.GaussianVector(d);
    p.row(i) = g.transpose();
  }
  return PointSet(std::move(p));
}

GeneratedData DenseSubspace(int n, int d, int k, double fraction, Rng& rng) {
  if (k < 1 || k >= d || !(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::kBadSpec, "dense-subspace needs 0 < k < d and fraction in [0, 1]");
  }
  Matrix raw(d, k);
  for (int j = 0; j < k; ++j) raw.col(j) = rng.GaussianVector(d);
  const Subspace planted = Orthonormalize(raw);
  const int inside = static_cast<int>(std::lround(fraction * n));
  Matrix p(n, d);
  GeneratedData out;
  for (int i = 0; i < n; ++i) {
    if (i < inside) {
      Vector c = rng.GaussianVector(planted.dim());
      while (c.norm() <= 1e-12) c = rng.GaussianVector(planted.dim());
      p.row(i) = (planted.basis() * c).transpose();
      out.truth.planted_members.push_back(i);
    } else {
      p.row(i) = rng.GaussianVector(d).transpose();
    }
  }
  out.points = PointSet(std::move(p));
  out.truth.planted_basis = planted.basis();
  return out;
}

GeneratedData MarginHalfspace(int n, int d, double margin, std::uint64_t w_seed,
                              Rng& rng) {
  if (!(margin >= 0.0 && margin < 1.0)) {
    throw Error(ErrorKind::kBadSpec, "margin must lie in [0, 1)");
  }
  Rng w_rng(w_seed);
  const Vector w = w_rng.UnitSphere(d);
  Matrix p(n, d);
  std::vector<int> labels(static_cast<size_t>(n));
  std::int64_t attempts = 0;
  for (int i = 0; i < n; ++i) {
    for (;;) {
      if (++attempts > kMaxRejections) {
        throw Error(ErrorKind::kBadSpec, "margin too large to rejection sample");
      }
      const Vector x = rng.UnitSphere(d);
      const double dot = w.dot(x);
      if (std::abs(dot) >= margin && dot != 0.0) {
        p.row(i) = x.transpose();
        labels[static_cast<size_t>(i)] = dot > 0.0 ? 1 : -1;
        break;
      }
    }
  }
  GeneratedData out;
  out.points = PointSet(std::move(p), std::move(labels));
  out.truth.halfspace = w;
  out.truth.margin = margin;
  return out;
}

PointSet LabeledSphere(int n, const Vector& w, Rng& rng) {
  const int d = static_cast<int>(w.size());
  Matrix p(n, d);
  std::vector<int> labels(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vector x = rng.UnitSphere(d);
    while (w.dot(x) == 0.0) x = rng.UnitSphere(d);
    p.row(i) = x.transpose();
    labels[static_cast<size_t>(i)] = w.dot(x) > 0.0 ? 1 : -1;
  }
  return PointSet(std::move(p), std::move(labels));
}

GeneratedData Generate(std::string_view spec, int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw Error(ErrorKind::kBadSpec, "n and d must be positive");
  Rng rng = Rng::Substream(seed, 0);
  const auto [kind, rest] = Head(spec);
  GeneratedData out;
  if (kind == "sphere-uniform" && rest.empty()) {
    out.points = SphereUniform(n, d, rng);
  } else if (kind == "gaussian" && rest.empty()) {
    out.points = GaussianPoints(n, d, rng);
  } else if (kind == "dense-subspace") {
    const auto [k, fraction] = Head(rest);
    if (fraction.empty() || fraction.find(':') != std::string_view::npos) {
      throw Error(ErrorKind::kBadSpec, "expected dense-subspace:k:fraction");
    }
    const double kk = ParseNumber(k, spec);
    if (kk != std::floor(kk)) throw Error(ErrorKind::kBadSpec, "k must be an integer");
    out = DenseSubspace(n, d, static_cast<int>(kk), ParseNumber(fraction, spec), rng);
  } else if (kind == "margin-halfspace") {
    const auto [margin, w_seed] = Head(rest);
    if (w_seed.empty() || w_seed.find(':') != std::string_view::npos) {
      throw Error(ErrorKind::kBadSpec, "expected margin-halfspace:margin:w_seed");
    }
    const double ws = ParseNumber(w_seed, spec);
    if (ws < 0 || ws != std::floor(ws)) throw Error(ErrorKind::kBadSpec, "bad w_seed");
    out = MarginHalfspace(n, d, ParseNumber(margin, spec), static_cast<std::uint64_t>(ws), rng);
  } else if (kind == "rcn") {
    const auto [eta_text, inner] = Head(rest);
    const double eta = ParseNumber(eta_text, spec);
    if (!(eta >= 0.0 && eta < 0.5) || inner.empty()) {
      throw Error(ErrorKind::kBadSpec, "expected rcn:eta:<spec> with eta in [0, 0.5)");
    }
    out = Generate(inner, n, d, seed);
    if (!out.points.labeled()) throw Error(ErrorKind::kBadSpec, "rcn needs a labeled inner spec");
    Rng flip = Rng::Substream(seed, 1);
    std::vector<int> labels = out.points.labels();
    for (int i = 0; i < n; ++i) {
      if (flip.Uniform() < eta) {
        labels[static_cast<size_t>(i)] = -labels[static_cast<size_t>(i)];
        out.truth.flipped.push_back(i);
      }
    }
    out.points = PointSet(out.points.points(), std::move(labels));
  } else {
    throw Error(ErrorKind::kBadSpec, "unknown spec '" + std::string(spec) + "'");
  }
  out.truth.spec = std::string(spec);
  return out;
}

}  // namespace forster
