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

#ifndef FORSTER_LINALG_HPP_
#define FORSTER_LINALG_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "forster/errors.hpp"

namespace forster {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Tolerance for structural invariants (orthonormality, symmetry, traces).
inline constexpr double kStructuralTol = 1e-9;
// Relative projection residual under which a point counts as inside a subspace.
inline constexpr double kMembershipTol = 1e-9;
// Points with norm at or below this are rejected at ingestion.
inline constexpr double kMinPointNorm = 1e-300;

// A multiset of n nonzero points in R^d, stored one point per row, with
// optional +1/-1 labels.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(Matrix points);
  PointSet(Matrix points, std::vector<int> labels);

  int n() const { return static_cast<int>(points_.rows()); }
  int d() const { return static_cast<int>(points_.cols()); }
  Vector point(int i) const { return points_.row(i).transpose(); }
  const Matrix& points() const { return points_; }

  bool labeled() const { return !labels_.empty(); }
  const std::vector<int>& labels() const { return labels_; }
  int label(int i) const { return labels_.at(static_cast<size_t>(i)); }

  PointSet Subset(std::span<const int> indices) const;

 private:
  Matrix points_;
  std::vector<int> labels_;
};

// An invertible d x d matrix acting through x -> Ax / |Ax|.
class Transform {
 public:
  Transform() = default;
  explicit Transform(Matrix matrix);

  static Transform Identity(int d) { return Transform(Matrix::Identity(d, d)); }

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }

  // sigma_min / sigma_max, estimated from Frobenius norms of A and its
  // inverse; within a factor d of the true ratio.
  double InverseConditionEstimate() const;

  // Throws SingularTransform unless InverseConditionEstimate() > tol.
  void RequireInvertible(double tol = 1e-12) const;

 private:
  Matrix matrix_;
};

// A k-dimensional subspace of R^d held as a d x k matrix with orthonormal
// columns.
class Subspace {
 public:
  Subspace() = default;
  // `basis` must already be orthonormal; checked to kStructuralTol.
  explicit Subspace(Matrix basis);

  static Subspace Full(int d) { return Subspace(Matrix::Identity(d, d)); }
  static Subspace Zero(int d) { return Subspace(Matrix(d, 0)); }

  int dim() const { return static_cast<int>(basis_.cols()); }
  int ambient() const { return static_cast<int>(basis_.rows()); }
  const Matrix& basis() const { return basis_; }

  Matrix Projector() const { return basis_ * basis_.transpose(); }
  Vector Project(const Vector& x) const {
    return basis_ * (basis_.transpose() * x);
  }
  Subspace Complement() const;

  // True when |x - proj x| <= tol * |x|.
  bool Contains(const Vector& x, double tol = kMembershipTol) const;

 private:
  Matrix basis_;
};

// Second moment of normalized points, always divided by the full-set count.
struct MomentMatrix {
  Matrix entries;
  int normalizer = 0;
};

// Ax / |Ax|.
Vector NormalizeMap(const Transform& a, const Vector& x);

// n x d matrix whose rows are f_A(x_i).
Matrix NormalizedPoints(const Transform& a, const PointSet& x);

MomentMatrix SecondMoment(const Transform& a, const PointSet& x,
                          std::span<const int> subset, int normalizer);
MomentMatrix SecondMoment(const Transform& a, const PointSet& x);

// I_{V1} M I_{V2} for the moment of `subset`, normalized by `normalizer`.
Matrix BlockMoment(const Transform& a, const PointSet& x,
                   std::span<const int> subset, int normalizer,
                   const Subspace& v1, const Subspace& v2);

Vector Project(const Vector& x, const Subspace& v);

// Squared Frobenius norm of the full second moment.
double Potential(const Transform& a, const PointSet& x);
double FrobeniusSquared(const Matrix& m);

// Gram-Schmidt with one reorthogonalization pass over the columns of
// `vectors`. A column whose residual norm is at most drop_tol times its
// original norm is discarded.
Subspace Orthonormalize(const Matrix& vectors, double drop_tol = 1e-10);

std::vector<int> AllIndices(int n);

}  // namespace forster

#endif  // FORSTER_LINALG_HPP_
