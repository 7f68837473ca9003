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

#include "forster/linalg.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace forster {

PointSet::PointSet(Matrix points) : points_(std::move(points)) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw Error(ErrorKind::kDegenerateInput, "point set needs n >= 1, d >= 1");
  }
  for (int i = 0; i < n(); ++i) {
    const double norm = points_.row(i).norm();
    if (!std::isfinite(norm)) {
      throw Error(ErrorKind::kDegenerateInput,
                  "point " + std::to_string(i) + " is not finite");
    }
    if (norm <= kMinPointNorm) {
      throw Error(ErrorKind::kZeroVector,
                  "point " + std::to_string(i) + " has zero norm");
    }
  }
}

PointSet::PointSet(Matrix points, std::vector<int> labels)
    : PointSet(std::move(points)) {
  if (static_cast<int>(labels.size()) != n()) {
    throw Error(ErrorKind::kDegenerateInput, "label count differs from n");
  }
  for (int y : labels) {
    if (y != 1 && y != -1) {
      throw Error(ErrorKind::kDegenerateInput, "labels must be +1 or -1");
    }
  }
  labels_ = std::move(labels);
}

PointSet PointSet::Subset(std::span<const int> indices) const {
  Matrix rows(static_cast<Eigen::Index>(indices.size()), d());
  std::vector<int> labels;
  for (size_t r = 0; r < indices.size(); ++r) {
    rows.row(static_cast<Eigen::Index>(r)) = points_.row(indices[r]);
    if (labeled()) labels.push_back(labels_[static_cast<size_t>(indices[r])]);
  }
  if (labeled()) return PointSet(std::move(rows), std::move(labels));
  return PointSet(std::move(rows));
}

Transform::Transform(Matrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1) {
    throw Error(ErrorKind::kSingularTransform, "transform must be square");
  }
  if (!matrix_.allFinite()) {
    throw Error(ErrorKind::kSingularTransform, "transform is not finite");
  }
}

double Transform::InverseConditionEstimate() const {
  Eigen::FullPivLU<Matrix> lu(matrix_);
  if (!lu.isInvertible()) return 0.0;
  const double inv_norm = lu.inverse().norm();
  if (!std::isfinite(inv_norm) || inv_norm == 0.0) return 0.0;
  return 1.0 / (matrix_.norm() * inv_norm);
}

void Transform::RequireInvertible(double tol) const {
  const double r = InverseConditionEstimate();
  if (!(r > tol)) {
    throw Error(ErrorKind::kSingularTransform,
                "inverse condition estimate " + std::to_string(r) +
                    " is below " + std::to_string(tol));
  }
}

Subspace::Subspace(Matrix basis) : basis_(std::move(basis)) {
  if (basis_.cols() > basis_.rows()) {
    throw Error(ErrorKind::kDegenerateInput, "subspace has more than d vectors");
  }
  if (basis_.cols() > 0) {
    const Matrix gram = basis_.transpose() * basis_;
    const Matrix id = Matrix::Identity(gram.rows(), gram.cols());
    if ((gram - id).cwiseAbs().maxCoeff() > kStructuralTol) {
      throw Error(ErrorKind::kDegenerateInput, "subspace basis is not orthonormal");
    }
  }
}

Subspace Subspace::Complement() const {
  const int d = ambient();
  Matrix candidates(d, dim() + d);
  candidates << basis_, Matrix::Identity(d, d);
  const Subspace all = Orthonormalize(candidates);
  return Subspace(all.basis().rightCols(all.dim() - dim()).eval());
}

bool Subspace::Contains(const Vector& x, double tol) const {
  const double norm = x.norm();
  if (norm == 0.0) return true;
  return (x - Project(x)).norm() <= tol * norm;
}

Vector NormalizeMap(const Transform& a, const Vector& x) {
  const double xn = x.norm();
  if (!(xn > 0.0)) throw Error(ErrorKind::kZeroVector, "cannot normalize 0");
  // Pre-scaling by |x| keeps Ax away from overflow and underflow.
  Vector ax = a.matrix() * (x / xn);
  const double n = ax.norm();
  if (!(n > kMinPointNorm) || !std::isfinite(n)) {
    throw Error(ErrorKind::kSingularTransform, "|Ax| underflowed");
  }
  return ax / n;
}

Matrix NormalizedPoints(const Transform& a, const PointSet& x) {
  Matrix out(x.n(), x.d());
  for (int i = 0; i < x.n(); ++i) {
    out.row(i) = NormalizeMap(a, x.point(i)).transpose();
  }
  return out;
}

MomentMatrix SecondMoment(const Transform& a, const PointSet& x,
                          std::span<const int> subset, int normalizer) {
  const int d = x.d();
  Matrix m = Matrix::Zero(d, d);
  for (int i : subset) {
    const Vector f = NormalizeMap(a, x.point(i));
    m.selfadjointView<Eigen::Lower>().rankUpdate(f);
  }
  m = m.selfadjointView<Eigen::Lower>();
  m /= static_cast<double>(normalizer);
  return {std::move(m), normalizer};
}

MomentMatrix SecondMoment(const Transform& a, const PointSet& x) {
  const std::vector<int> all = AllIndices(x.n());
  return SecondMoment(a, x, all, x.n());
}

Matrix BlockMoment(const Transform& a, const PointSet& x,
                   std::span<const int> subset, int normalizer,
                   const Subspace& v1, const Subspace& v2) {
  const Matrix m = SecondMoment(a, x, subset, normalizer).entries;
  return v1.Projector() * m * v2.Projector();
}

Vector Project(const Vector& x, const Subspace& v) { return v.Project(x); }

double FrobeniusSquared(const Matrix& m) { return m.squaredNorm(); }

double Potential(const Transform& a, const PointSet& x) {
  return FrobeniusSquared(SecondMoment(a, x).entries);
}

Subspace Orthonormalize(const Matrix& vectors, double drop_tol) {
  const int d = static_cast<int>(vectors.rows());
  Matrix basis(d, std::min<Eigen::Index>(d, vectors.cols()));
  int k = 0;
  for (Eigen::Index c = 0; c < vectors.cols() && k < d; ++c) {
    const double original = vectors.col(c).norm();
    if (original == 0.0) continue;
    Vector w = vectors.col(c) / original;
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < k; ++j) w -= basis.col(j).dot(w) * basis.col(j);
    }
    const double residual = w.norm();
    if (residual <= drop_tol) continue;
    basis.col(k++) = w / residual;
  }
  return Subspace(basis.leftCols(k).eval());
}

std::vector<int> AllIndices(int n) {
  std::vector<int> out(static_cast<size_t>(n));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

}  // namespace forster
