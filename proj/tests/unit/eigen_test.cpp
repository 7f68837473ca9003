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


#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "forster/eigen.hpp"
#include "oracles.hpp"

using forster::EigenApprox;
using forster::EigenConfig;
using forster::Matrix;
using forster::Vector;

namespace {

EigenConfig Config(std::uint64_t seed, double eta = 0.05) {
  EigenConfig cfg;
  cfg.seed = seed;
  cfg.accuracy = eta;
  return cfg;
}

// A decomposition assembled from the reference solver, optionally inflated.
EigenApprox FromReference(const Matrix& m, double inflate = 0.0) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  EigenApprox e;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    e.pairs.push_back({es.eigenvalues()(i) * (1 + inflate), es.eigenvectors().col(i)});
  }
  return e;
}

}  // namespace

TEST_CASE("identity is recovered with any orthonormal frame") {
  const Matrix m = Matrix::Identity(3, 3);
  const EigenApprox e = forster::ApproxEigendecomposition(m, Config(1));
  REQUIRE(e.dim() == 3);
  for (const auto& p : e.pairs) CHECK(p.value == doctest::Approx(1.0).epsilon(0.05));
  CHECK((forster::Reconstruct(e) - m).norm() < 0.05 * std::sqrt(3.0));
}

TEST_CASE("diagonal matrix: values and axes") {
  const Matrix m = Vector((Vector(2) << 4, 1).finished()).asDiagonal();
  const EigenApprox e = forster::ApproxEigendecomposition(m, Config(2, 0.01));
  const auto sorted = forster::SortedDescending(e);
  CHECK(sorted[0].value == doctest::Approx(4.0).epsilon(0.01));
  CHECK(sorted[1].value == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::acos(std::min(1.0, std::abs(sorted[0].direction(0)))) <= 10 * 0.01);
  CHECK(std::acos(std::min(1.0, std::abs(sorted[1].direction(1)))) <= 10 * 0.01);
}

TEST_CASE("kernel direction is annihilated") {
  const Matrix m = Vector((Vector(2) << 1, 0).finished()).asDiagonal();
  const EigenApprox e = forster::ApproxEigendecomposition(m, Config(3));
  const Matrix r = forster::Reconstruct(e);
  CHECK(std::abs(r(1, 1)) <= 1e-12);
  CHECK(e.verified);
}

TEST_CASE("reconstruct") {
  EigenApprox single;
  single.pairs.push_back({2.0, (Vector(2) << 1, 0).finished()});
  single.pairs.push_back({0.0, Vector::Zero(2)});
  const Matrix expect = Vector((Vector(2) << 2, 0).finished()).asDiagonal();
  CHECK((forster::Reconstruct(single) - expect).norm() == 0.0);

  const EigenApprox e = forster::ApproxEigendecomposition(Matrix::Identity(4, 4), Config(4));
  CHECK((forster::Reconstruct(e) - Matrix::Identity(4, 4)).norm() < 0.1);
}

TEST_CASE("verification") {
  oracle::Gen gen(31);
  const Matrix m = gen.Psd(5, 1e3);
  SUBCASE("exact decomposition passes with ratio near zero") {
    const auto v = forster::VerifyMultiplicative(m, FromReference(m), 0.05, 1000, 1);
    CHECK(v.passed);
    CHECK(v.worst_ratio < 1e-9);
  }
  SUBCASE("a 10 percent inflation fails at eta 0.05") {
    const auto v = forster::VerifyMultiplicative(m, FromReference(m, 0.1), 0.05, 1000, 1);
    CHECK_FALSE(v.passed);
    CHECK(v.worst_ratio == doctest::Approx(0.1).epsilon(1e-6));
  }
  SUBCASE("real decomposition of a random matrix passes") {
    const Matrix m6 = gen.Psd(6, 1e4);
    const EigenApprox e = forster::ApproxEigendecomposition(m6, Config(5));
    CHECK(forster::VerifyMultiplicative(m6, e, 0.05, 4000, 99).passed);
  }
}

TEST_CASE("input validation") {
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(forster::ApproxEigendecomposition(asym, Config(1)), forster::Error);
  const Matrix neg = Vector((Vector(2) << 1, -1).finished()).asDiagonal();
  try {
    forster::ApproxEigendecomposition(neg, Config(1));
    FAIL("expected NotPSD");
  } catch (const forster::Error& e) {
    CHECK(e.kind() == forster::ErrorKind::kNotPSD);
  }
}

TEST_CASE("orthogonality, gap fidelity and determinism on random matrices") {
  oracle::Gen gen(37);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + trial % 7;
    const double eta = 0.05;
    // Planted gap of at least 2 between positions k and k+1.
    const int k = 1 + trial % (d - 1);
    Vector lambda(d);
    for (int i = 0; i < d; ++i) {
      lambda(i) = std::exp(-gen.Uniform() * 3) * (i < k ? 4.0 : 1.0) * (i < k ? 1.0 : 0.5);
    }
    const Matrix q = gen.Orthogonal(d);
    const Matrix m = q * lambda.asDiagonal() * q.transpose();

    const EigenConfig cfg = Config(static_cast<std::uint64_t>(trial), eta);
    const EigenApprox e = forster::ApproxEigendecomposition(m, cfg);
    for (int i = 0; i < e.dim(); ++i) {
      for (int j = i + 1; j < e.dim(); ++j) {
        const double scale = e.pairs[i].direction.norm() * e.pairs[j].direction.norm();
        CHECK(std::abs(e.pairs[i].direction.dot(e.pairs[j].direction)) <= 1e-9 * std::max(scale, 1e-300));
      }
    }

    std::vector<int> order(d);
    for (int i = 0; i < d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return lambda(a) > lambda(b); });
    Matrix truth(d, k);
    for (int i = 0; i < k; ++i) truth.col(i) = q.col(order[i]);
    const auto sorted = forster::SortedDescending(e);
    Matrix top(d, k);
    for (int i = 0; i < k; ++i) top.col(i) = sorted[i].direction;
    CHECK(oracle::PrincipalAngle(truth, top) <= 10 * eta);

    const EigenApprox again = forster::ApproxEigendecomposition(m, cfg);
    CHECK(forster::Reconstruct(again) == forster::Reconstruct(e));
    CHECK(again.power_used == e.power_used);
  }
}

TEST_CASE("seed retries drive failures down") {
  // A single power-iteration step from a random start rarely satisfies a
  // tight multiplicative bound; picking the first verified seed out of
  // several never admits an unverified result.
  oracle::Gen gen(41);
  const Matrix m = gen.Psd(4, 1e2);
  EigenConfig cfg = Config(0, 0.05);
  cfg.power = 3;
  int passed = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    cfg.seed = s;
    const EigenApprox e = forster::ApproxEigendecomposition(m, cfg);
    const auto v = forster::VerifyMultiplicative(m, e, 0.05, 2000, s + 100);
    if (e.verified) {
      ++passed;
      CHECK(v.worst_ratio <= 0.05 * 1.5);
    }
  }
  CHECK(passed < 20);
}

TEST_CASE("theory mode uses the nominal schedule") {
  EigenConfig cfg = Config(7, 0.1);
  cfg.mode = forster::Mode::kTheory;
  const Matrix m = Vector((Vector(3) << 3, 2, 1).finished()).asDiagonal();
  const EigenApprox e = forster::ApproxEigendecomposition(m, cfg);
  CHECK(e.power_nominal == forster::TheoryPower(3, 0.1, 0.01, 1.0));
  CHECK(e.power_used <= e.power_nominal);
  CHECK(e.verified);
  CHECK(e.range == forster::DefaultRange(3, 0.01));
  CHECK(forster::DefaultRange(3, 0.01) == 30000);
  CHECK(forster::DefaultRange(1, 0.5) == 1000);
}
