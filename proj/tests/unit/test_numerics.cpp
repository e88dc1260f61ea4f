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


#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "akf/error.hpp"
#include "akf/numerics.hpp"
#include "akf/rng.hpp"
#include "generators.hpp"

namespace akf {
namespace {

using testing::random_symmetric;
using testing::random_matrix;
using testing::random_vector;

TEST(EigSym, DiagonalAndIdentity) {
  Matrix d(2, 2);
  d << 1.0, 0.0, 0.0, 2.0;
  const SymmetricEigen e = eig_sym(d);
  EXPECT_DOUBLE_EQ(e.values(0), 2.0);
  EXPECT_DOUBLE_EQ(e.values(1), 1.0);
  EXPECT_NEAR(std::fabs(e.vectors(1, 0)), 1.0, 1e-12);
  EXPECT_NEAR(std::fabs(e.vectors(0, 1)), 1.0, 1e-12);

  const SymmetricEigen id = eig_sym(Matrix::Identity(3, 3));
  EXPECT_TRUE(id.values.isApprox(Vector::Ones(3), 1e-14));
}

TEST(EigSym, TwoByTwoCharacteristicRoots) {
  Matrix m(2, 2);
  m << 2.0, 1.0, 1.0, 2.0;
  const SymmetricEigen e = eig_sym(m);
  EXPECT_NEAR(e.values(0), 3.0, 1e-12);
  EXPECT_NEAR(e.values(1), 1.0, 1e-12);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::fabs(e.vectors(0, 0)), r, 1e-12);
  EXPECT_NEAR(std::fabs(e.vectors(1, 0)), r, 1e-12);
  EXPECT_NEAR(e.vectors(0, 1) * e.vectors(1, 1), -0.5, 1e-12);
}

TEST(EigSym, RandomReconstructionAgainstEigenSolver) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + trial % 8);
    const Matrix m = random_symmetric(rng, n, 2.0);
    const SymmetricEigen e = eig_sym(m);

    const Matrix rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_LE((rebuilt - m).norm(), 1e-7 * std::max(m.norm(), 1e-300));
    EXPECT_LE((e.vectors.transpose() * e.vectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-8);
    for (Eigen::Index i = 0; i + 1 < n; ++i) EXPECT_GE(e.values(i), e.values(i + 1));
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector r = m * e.vectors.col(i) - e.values(i) * e.vectors.col(i);
      EXPECT_LE(r.norm(), 1e-8 * std::max(1.0, m.norm()));
    }

    // Independent oracle: Eigen's tridiagonal QR solver, ascending order.
    const Vector ref = Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().reverse();
    EXPECT_LE((ref - e.values).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, m.norm()));
  }
}

TEST(EigSym, SignConventionIsDeterministic) {
  Rng rng(5);
  const Matrix m = random_symmetric(rng, 5);
  const SymmetricEigen a = eig_sym(m);
  const SymmetricEigen b = eig_sym(m);
  EXPECT_EQ(a.vectors, b.vectors);
  for (Eigen::Index c = 0; c < a.vectors.cols(); ++c) {
    Eigen::Index idx = 0;
    a.vectors.col(c).cwiseAbs().maxCoeff(&idx);
    EXPECT_GT(a.vectors(idx, c), 0.0);
  }
}

TEST(EigSym, Errors) {
  EXPECT_THROW(eig_sym(Matrix::Zero(2, 3)), DimensionError);
  Matrix nan = Matrix::Identity(2, 2);
  nan(0, 1) = nan(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(eig_sym(nan), ValueError);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.5;
  EXPECT_THROW(eig_sym(asym), ValueError);
}

TEST(LeastSquares, PaperShapedExamples) {
  EXPECT_NEAR(least_squares(Vector(Vector::Constant(1, 2.0)), Vector(Vector::Constant(1, 6.0)))(0, 0), 3.0, 1e-12);

  const Matrix h = least_squares(Vector(Vector::Ones(2)), Vector(Vector::Constant(1, 4.0)));
  ASSERT_EQ(h.rows(), 1);
  ASSERT_EQ(h.cols(), 2);
  EXPECT_NEAR(h(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(h(0, 1), 2.0, 1e-12);

  Vector x(2), z(2);
  x << 1.0, 0.0;
  z << 5.0, 0.0;
  Matrix expected(2, 2);
  expected << 5.0, 0.0, 0.0, 0.0;
  EXPECT_LE((least_squares(x, z) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LeastSquares, ZeroNormThrows) {
  EXPECT_THROW(least_squares(Vector(Vector::Zero(3)), Vector(Vector::Ones(2))), NumericError);
}

TEST(LeastSquares, RandomSingleSampleMinimumNorm) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = random_vector(rng, 1 + trial % 5);
    const Vector z = random_vector(rng, 1 + trial % 3);
    const Matrix h = least_squares(x, z);
    EXPECT_LE((h * x - z).norm(), 1e-10 * std::max(1.0, z.norm()));
    // Minimum norm: every row lies in span(x).
    const Matrix oracle = z * x.transpose() / x.squaredNorm();
    EXPECT_LE((h - oracle).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(LeastSquares, MultiSampleResidualOrthogonalToDesign) {
  Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 1 + trial % 4, m = 1 + trial % 3, s = 6 + trial % 5;
    const Matrix xs = random_matrix(rng, n, s);
    const Matrix zs = random_matrix(rng, m, s);
    const Matrix h = least_squares(xs, zs);
    // Normal equations oracle: (Z - h X) X^T = 0.
    const Matrix normal = (zs - h * xs) * xs.transpose();
    EXPECT_LE(normal.cwiseAbs().maxCoeff(), 1e-8);
    const Matrix oracle = zs * xs.transpose() * (xs * xs.transpose()).inverse();
    EXPECT_LE((h - oracle).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(JacobianFd, AnalyticCases) {
  const VectorFn id = [](const Vector& x) { return x; };
  Rng rng(3);
  const Vector x0 = random_vector(rng, 4);
  EXPECT_LE((jacobian_fd(id, x0) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-9);

  const VectorFn sq = [](const Vector& x) { return Vector::Constant(1, x(0) * x(0)); };
  EXPECT_NEAR(jacobian_fd(sq, Vector::Constant(1, 2.0), 1e-5)(0, 0), 4.0, 1e-6);

  const VectorFn prod = [](const Vector& x) { return Vector::Constant(1, x(0) * x(1)); };
  Vector p(2);
  p << 3.0, 5.0;
  const Matrix j = jacobian_fd(prod, p);
  EXPECT_NEAR(j(0, 0), 5.0, 1e-6);
  EXPECT_NEAR(j(0, 1), 3.0, 1e-6);
}

TEST(JacobianFd, NonFiniteEvaluationThrows) {
  const VectorFn bad = [](const Vector& x) { return Vector::Constant(1, std::log(x(0))); };
  EXPECT_THROW(jacobian_fd(bad, Vector::Constant(1, 0.0)), ValueError);
}

TEST(Softmax, Examples) {
  EXPECT_TRUE(softmax(Vector::Constant(5, 3.7)).isApprox(Vector::Constant(5, 0.2), 1e-15));
  Vector l(2);
  l << 0.0, std::log(2.0);
  const Vector s = softmax(l);
  EXPECT_NEAR(s(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s(1), 2.0 / 3.0, 1e-15);
  const Vector big = softmax(Vector::Constant(2, 1000.0));
  EXPECT_DOUBLE_EQ(big(0), 0.5);
  EXPECT_DOUBLE_EQ(big(1), 0.5);
  EXPECT_THROW(softmax(Vector()), DimensionError);
}

TEST(Softmax, ShiftInvarianceAndNormalization) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    // Dyadic logits and integer shifts make x + c exact, so the max-shifted
    // logits, and with them the outputs, are bit-identical.
    const Vector x = (random_vector(rng, 1 + trial % 9, 5.0) * 64.0).array().round() / 64.0;
    const double c = static_cast<double>(trial % 7 + 1) * (trial % 2 ? 1.0 : -1.0);
    const Vector a = softmax(x);
    const Vector b = softmax((x.array() + c).matrix());
    EXPECT_EQ(a, b);
    EXPECT_NEAR(a.sum(), 1.0, 1e-12);
    EXPECT_GT(a.minCoeff(), 0.0);
  }
}

TEST(Rng, EqualSeedsGiveIdenticalStreams) {
  Rng a(1234), b(1234), c(1235);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    differs |= va != c.next_u64();
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(Rng::derive_seed(9, "x"), Rng::derive_seed(9, "x"));
  EXPECT_NE(Rng::derive_seed(9, "x"), Rng::derive_seed(9, "y"));
  EXPECT_NE(Rng::derive_seed(9, std::uint64_t{0}), Rng::derive_seed(9, std::uint64_t{1}));
}

TEST(Rng, DistributionMoments) {
  Rng rng(77);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, se = 0, sp = 0;
  for (int i = 0; i < n; ++i) {
    su += rng.uniform();
    const double g = rng.normal();
    sn += g;
    sn2 += g * g;
    se += rng.exponential(4.0);
    sp += static_cast<double>(rng.poisson(i % 2 ? 3.5 : 80.0));
  }
  EXPECT_NEAR(su / n, 0.5, 5e-3);
  EXPECT_NEAR(sn / n, 0.0, 1e-2);
  EXPECT_NEAR(sn2 / n, 1.0, 1e-2);
  EXPECT_NEAR(se / n, 0.25, 3e-3);
  EXPECT_NEAR(sp / n, (3.5 + 80.0) / 2.0, 0.1);
}

TEST(Symmetrize, AveragesTranspose) {
  Matrix m(2, 2);
  m << 1.0, 2.0, 4.0, 3.0;
  Matrix expected(2, 2);
  expected << 1.0, 3.0, 3.0, 3.0;
  EXPECT_EQ(symmetrize(m), expected);
}

}  // namespace
}  // namespace akf
