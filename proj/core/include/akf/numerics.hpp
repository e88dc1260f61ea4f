// Copyright 2026 The akf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AKF_NUMERICS_HPP_
#define AKF_NUMERICS_HPP_

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string_view>

namespace akf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Vector-valued map used for state transitions and measurement functions.
using VectorFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

/// Throws ValueError naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);
void require_finite(const Vector& v, std::string_view what);
void require_square(const Matrix& m, std::string_view what);

/// (m + m^T) / 2.
Matrix symmetrize(const Matrix& m);

struct SymmetricEigen {
  Vector values;   ///< descending
  Matrix vectors;  ///< column i pairs with values(i); orthonormal
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// The input is symmetrized before iterating. Each eigenvector is signed so
/// that its largest-magnitude entry is positive, which makes the output
/// deterministic. Throws DimensionError for non-square input, ValueError for
/// non-finite entries or asymmetry above 1e-9 (relative to the largest entry).
SymmetricEigen eig_sym(const Matrix& m);

/// Minimum-norm least-squares solution h of z = h * x for a single sample.
/// Throws NumericError if x has zero norm.
Matrix least_squares(const Vector& x, const Vector& z);

/// Least-squares h minimizing ||Z - h X||_F where columns of X (n x s) and
/// Z (m x s) are paired samples. Solved through Tikhonov-damped normal
/// equations (damping 1e-10 I), using whichever Gram matrix is smaller.
Matrix least_squares(const Matrix& xs, const Matrix& zs);

/// Central-difference Jacobian of g at x0. Without an explicit step the
/// per-coordinate step is 1e-5 * max(1, |x0_j|).
Matrix jacobian_fd(const VectorFn& g, const Vector& x0, std::optional<double> step = std::nullopt);

/// Max-shifted softmax. Throws DimensionError on empty input.
Vector softmax(const Vector& logits);

}  // namespace akf

#endif  // AKF_NUMERICS_HPP_
