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

#include "akf/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "akf/error.hpp"

namespace akf {

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) throw ValueError(std::string(what) + " contains non-finite entries");
}

void require_finite(const Vector& v, std::string_view what) {
  if (!v.allFinite()) throw ValueError(std::string(what) + " contains non-finite entries");
}

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + " must be square and non-empty, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

SymmetricEigen eig_sym(const Matrix& input) {
  require_square(input, "eig_sym input");
  require_finite(input, "eig_sym input");
  const double scale = std::max(1.0, input.cwiseAbs().maxCoeff());
  if ((input - input.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw ValueError("eig_sym input is not symmetric");
  }

  const Eigen::Index n = input.rows();
  Matrix a = symmetrize(input);
  Matrix v = Matrix::Identity(n, n);

  const double frob = a.norm();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-15 * frob || off == 0.0) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // A <- J^T A J with J the (p, q) Givens rotation.
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    out.values(i) = a(src, src);
    Vector col = v.col(src);
    Eigen::Index big = 0;
    col.cwiseAbs().maxCoeff(&big);
    if (col(big) < 0.0) col = -col;
    out.vectors.col(i) = col;
  }
  return out;
}

Matrix least_squares(const Vector& x, const Vector& z) {
  return least_squares(Matrix(x), Matrix(z));
}

Matrix least_squares(const Matrix& xs, const Matrix& zs) {
  if (xs.cols() != zs.cols() || xs.cols() == 0 || xs.rows() == 0 || zs.rows() == 0) {
    throw DimensionError("least_squares: x and z must hold the same non-zero number of samples");
  }
  require_finite(xs, "least_squares design");
  require_finite(zs, "least_squares target");
  if (xs.norm() < 1e-12) throw NumericError("least_squares: design has zero norm (singular)");

  // Minimum-norm solution of X^T h^T = Z^T.
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(xs.transpose());
  return cod.solve(zs.transpose()).transpose();
}

Matrix jacobian_fd(const VectorFn& g, const Vector& x0, std::optional<double> step) {
  require_finite(x0, "jacobian_fd point");
  const Vector g0 = g(x0);
  require_finite(g0, "jacobian_fd function value");
  Matrix jac(g0.size(), x0.size());
  for (Eigen::Index j = 0; j < x0.size(); ++j) {
    const double delta = step ? *step : 1e-5 * std::max(1.0, std::fabs(x0(j)));
    Vector plus = x0;
    Vector minus = x0;
    plus(j) += delta;
    minus(j) -= delta;
    const Vector gp = g(plus);
    const Vector gm = g(minus);
    if (gp.size() != g0.size() || gm.size() != g0.size()) {
      throw DimensionError("jacobian_fd: function output size changed between evaluations");
    }
    if (!gp.allFinite() || !gm.allFinite()) {
      throw ValueError("jacobian_fd: non-finite function value near coordinate " + std::to_string(j));
    }
    jac.col(j) = (gp - gm) / (plus(j) - minus(j));
  }
  return jac;
}

Vector softmax(const Vector& logits) {
  if (logits.size() == 0) throw DimensionError("softmax of an empty vector");
  require_finite(logits, "softmax logits");
  const double shift = logits.maxCoeff();
  Vector e = (logits.array() - shift).exp();
  return e / e.sum();
}

}  // namespace akf
