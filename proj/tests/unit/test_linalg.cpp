// Copyright 2026 The ive Authors.
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

#include <cmath>
#include <random>

#include "ive/errors.hpp"
#include "ive/linalg.hpp"
#include "test_util.hpp"

namespace ive {
namespace {

using linalg::cholesky;
using linalg::gevd_full;
using linalg::gevd_top;
using linalg::inv_sqrt;
using linalg::log_abs_det;
using linalg::solve_linear;
using test::random_hpd;
using test::random_matrix;

// Laplace expansion along the first row.
Complex cofactor_det(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  if (n == 1) return a(0, 0);
  Complex acc = 0.0;
  for (int j = 0; j < n; ++j) {
    Matrix minor(n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      for (int c = 0, cc = 0; c < n; ++c) {
        if (c != j) minor(r - 1, cc++) = a(r, c);
      }
    }
    acc += (j % 2 == 0 ? 1.0 : -1.0) * a(0, j) * cofactor_det(minor);
  }
  return acc;
}

// Gauss-Jordan elimination with row pivoting, written out loop by loop.
Matrix naive_solve(Matrix a, Matrix b) {
  const int n = static_cast<int>(a.rows());
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int r = k + 1; r < n; ++r) {
      if (std::abs(a(r, k)) > std::abs(a(p, k))) p = r;
    }
    a.row(k).swap(a.row(p));
    b.row(k).swap(b.row(p));
    for (int r = 0; r < n; ++r) {
      if (r == k) continue;
      const Complex m = a(r, k) / a(k, k);
      for (int c = 0; c < n; ++c) a(r, c) -= m * a(k, c);
      for (int c = 0; c < b.cols(); ++c) b(r, c) -= m * b(k, c);
    }
  }
  for (int r = 0; r < n; ++r) b.row(r) /= a(r, r);
  return b;
}

Matrix diag(std::initializer_list<Complex> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  int k = 0;
  for (const auto& x : d) v(k++) = x;
  return v.asDiagonal();
}

TEST(Cholesky, IdentityAndDiagonal) {
  EXPECT_TRUE(cholesky(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3)));
  EXPECT_TRUE(cholesky(diag({4.0, 9.0})).isApprox(diag({2.0, 3.0})));
}

TEST(Cholesky, ReconstructsRandomPd) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 8;
    const Matrix a = random_hpd(n, rng);
    const Matrix l = cholesky(a);
    // Explicit triple loop instead of l * l.adjoint().
    Matrix rec = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) rec(i, j) += l(i, k) * std::conj(l(j, k));
      }
    }
    EXPECT_LE((rec - a).norm() / a.norm(), 1e-10);
    for (int i = 0; i < n; ++i) {
      EXPECT_GT(l(i, i).real(), 0.0);
      EXPECT_EQ(l(i, i).imag(), 0.0);
      for (int j = i + 1; j < n; ++j) EXPECT_EQ(l(i, j), Complex(0.0));
    }
  }
}

TEST(Cholesky, RejectsIndefinite) {
  EXPECT_THROW(cholesky(diag({1.0, -1.0})), NotPositiveDefinite);
  EXPECT_THROW(cholesky(Matrix::Zero(2, 2)), NotPositiveDefinite);
  EXPECT_THROW(cholesky(Matrix::Zero(2, 3)), DimensionMismatch);
}

TEST(SolveLinear, SpecExamples) {
  const Matrix e1 = Matrix::Identity(2, 1);
  EXPECT_TRUE(solve_linear(Matrix::Identity(2, 2), e1).isApprox(e1));
  Matrix b(2, 1);
  b << 2.0, 4.0;
  EXPECT_TRUE(solve_linear(diag({2.0, 4.0}), b).isApprox(Matrix::Ones(2, 1)));
}

TEST(SolveLinear, MatchesEliminationOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(5, 5, rng) + 4.0 * Matrix::Identity(5, 5);
    const Matrix b = random_matrix(5, 3, rng);
    const Matrix x = solve_linear(a, b);
    EXPECT_LE(test::rel_diff(x, naive_solve(a, b)), 1e-10);
    EXPECT_LE((a * x - b).norm() / b.norm(), 1e-12);
  }
}

TEST(SolveLinear, RejectsSingular) {
  Matrix a(2, 2);
  a << 1.0, 2.0, 2.0, 4.0;
  EXPECT_THROW(solve_linear(a, Matrix::Identity(2, 1)), SingularMatrix);
  EXPECT_THROW(solve_linear(Matrix::Zero(3, 3), Matrix::Identity(3, 1)), SingularMatrix);
  EXPECT_THROW(solve_linear(Matrix::Identity(2, 2), Matrix::Identity(3, 1)), DimensionMismatch);
}

// The Rayleigh-quotient early exit leaves the vector accurate to about the
// square root of the tolerance.
TEST(GevdTop, DiagonalExamples) {
  auto p = gevd_top(diag({3.0, 1.0}), Matrix::Identity(2, 2));
  EXPECT_NEAR(p.value, 3.0, 1e-12);
  EXPECT_NEAR(std::abs(p.vector(0)), 1.0, 1e-6);
  EXPECT_NEAR(std::abs(p.vector(1)), 0.0, 1e-6);

  p = gevd_top(diag({2.0, 2.0}), diag({1.0, 2.0}));
  EXPECT_NEAR(p.value, 2.0, 1e-12);
  EXPECT_NEAR(std::abs(p.vector(0)), 1.0, 1e-6);
}

TEST(GevdTop, AgreesWithFullDecomposition) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 7;
    const Matrix a = random_hpd(n, rng);
    const Matrix b = random_hpd(n, rng);
    const auto top = gevd_top(a, b, 2000, 0.0);
    const auto full = gevd_full(a, b);
    EXPECT_NEAR(top.value, full.front().value, 1e-8 * full.front().value);
    // gevd_top is unit-norm, gevd_full is b-normalized.
    const Vector ref = linalg::phase_normalized(full.front().vector.normalized());
    EXPECT_LE((top.vector - ref).norm(), 1e-6) << "n=" << n;
  }
}

TEST(GevdTop, SixBySixAfter200Iterations) {
  std::mt19937_64 rng(4);
  const Matrix a = random_hpd(6, rng);
  const Matrix b = random_hpd(6, rng);
  const auto top = gevd_top(a, b, 200, 0.0);
  const auto ref = gevd_full(a, b).front();
  EXPECT_NEAR(top.value, ref.value, 1e-6 * ref.value);
}

TEST(GevdTop, WarmStartAtEigenvectorIsFixed) {
  std::mt19937_64 rng(5);
  const Matrix a = random_hpd(4, rng);
  const Matrix b = random_hpd(4, rng);
  const auto ref = gevd_full(a, b).front();
  const auto top = gevd_top(a, b, ref.vector, 1, 0.0);
  EXPECT_NEAR(top.value, ref.value, 1e-10 * ref.value);
}

TEST(GevdFull, SpecExamples) {
  const auto pairs = gevd_full(diag({1.0, 5.0}), Matrix::Identity(2, 2));
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_NEAR(pairs[0].value, 5.0, 1e-12);
  EXPECT_NEAR(std::abs(pairs[0].vector(1)), 1.0, 1e-12);
  EXPECT_NEAR(pairs[1].value, 1.0, 1e-12);
  EXPECT_NEAR(std::abs(pairs[1].vector(0)), 1.0, 1e-12);

  std::mt19937_64 rng(6);
  const Matrix b = random_hpd(4, rng);
  for (const auto& p : gevd_full(b, b)) EXPECT_NEAR(p.value, 1.0, 1e-10);
}

TEST(GevdFull, ReconstructionAndBOrthogonality) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 8;
    const Matrix a = random_hpd(n, rng);
    const Matrix b = random_hpd(n, rng);
    const auto pairs = gevd_full(a, b);
    Matrix x(n, n);
    RealVector lambda(n);
    for (int k = 0; k < n; ++k) {
      x.col(k) = pairs[static_cast<std::size_t>(k)].vector;
      lambda(k) = pairs[static_cast<std::size_t>(k)].value;
      if (k > 0) EXPECT_GE(lambda(k - 1), lambda(k));
    }
    EXPECT_LE((a * x - b * x * lambda.cast<Complex>().asDiagonal()).norm(), 1e-8 * a.norm());
    EXPECT_LE((x.adjoint() * b * x - Matrix::Identity(n, n)).norm(), 1e-8);
  }
}

TEST(GevdFull, RejectsNonHermitian) {
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(gevd_full(a, Matrix::Identity(2, 2)), InvalidArgument);
  EXPECT_THROW(gevd_full(Matrix::Identity(2, 2), diag({1.0, -1.0})), NotPositiveDefinite);
}

TEST(InvSqrt, SpecExamples) {
  EXPECT_TRUE(inv_sqrt(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3)));
  EXPECT_TRUE(inv_sqrt(diag({4.0, 16.0})).isApprox(diag({0.5, 0.25})));
}

TEST(InvSqrt, SandwichIsIdentity) {
  std::mt19937_64 rng(8);
  for (int n = 1; n <= 8; ++n) {
    const Matrix a = random_hpd(n, rng);
    const Matrix r = inv_sqrt(a);
    EXPECT_LE((r * a * r - Matrix::Identity(n, n)).norm(), 1e-10);
    EXPECT_TRUE(linalg::is_hermitian(r, 1e-12));
  }
  EXPECT_THROW(inv_sqrt(diag({1.0, 0.0})), NotPositiveDefinite);
}

TEST(LogAbsDet, SpecExamples) {
  EXPECT_DOUBLE_EQ(log_abs_det(Matrix::Identity(4, 4)), 0.0);
  EXPECT_NEAR(log_abs_det(diag({2.0, Complex(0.0, 2.0)})), std::log(4.0), 1e-15);
  EXPECT_EQ(log_abs_det(Matrix::Zero(3, 3)), -std::numeric_limits<double>::infinity());
}

TEST(LogAbsDet, MatchesCofactorOracle) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(5, 5, rng);
    const double ref = std::log(std::abs(cofactor_det(a)));
    EXPECT_NEAR(log_abs_det(a), ref, 1e-9 * std::max(1.0, std::abs(ref)));
  }
}

TEST(LogAbsDet, ProductRule) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 8;
    const Matrix a = random_matrix(n, n, rng);
    const Matrix b = random_matrix(n, n, rng);
    EXPECT_NEAR(log_abs_det(a * b), log_abs_det(a) + log_abs_det(b), 1e-9 * n);
  }
}

TEST(PhaseNormalization, IdempotentAndRealPeak) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Vector v = test::random_vector(1 + trial % 6, rng);
    const Vector once = linalg::phase_normalized(v);
    const Vector twice = linalg::phase_normalized(once);
    EXPECT_EQ(once, twice);
    Eigen::Index k = 0;
    once.cwiseAbs().maxCoeff(&k);
    EXPECT_EQ(once(k).imag(), 0.0);
    EXPECT_GE(once(k).real(), 0.0);
    EXPECT_NEAR(once.norm(), v.norm(), 1e-12 * v.norm());
  }
  Vector zero = Vector::Zero(3);
  linalg::normalize_phase(zero);
  EXPECT_EQ(zero, Vector::Zero(3));
}

TEST(Hermitian, PartAndCheck) {
  std::mt19937_64 rng(12);
  const Matrix a = random_matrix(4, 4, rng);
  const Matrix h = linalg::hermitian_part(a);
  EXPECT_TRUE(linalg::is_hermitian(h));
  EXPECT_FALSE(linalg::is_hermitian(a));
  EXPECT_TRUE(h.isApprox((a + a.adjoint()) / 2.0));
}

}  // namespace
}  // namespace ive
