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

#include "ive/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ive/errors.hpp"

namespace ive::linalg {
namespace {

void require_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionMismatch(std::string(who) + ": expected a nonempty square matrix");
  }
}

// Factorizes b and returns L^{-1} a L^{-H} together with L.
struct HermitianReduction {
  Matrix lower;
  Matrix reduced;
};

Eigen::LLT<Matrix> checked_llt(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("cholesky: matrix is not positive definite");
  }
  const auto d = llt.matrixLLT().diagonal().real();
  if (!d.allFinite() || !(d.minCoeff() > 0.0)) {
    throw NotPositiveDefinite("cholesky: non-positive pivot");
  }
  return llt;
}

HermitianReduction reduce_pair(const Matrix& a, const Matrix& b) {
  require_square(a, "generalized eigenproblem");
  if (a.rows() != b.rows() || b.rows() != b.cols()) {
    throw DimensionMismatch("generalized eigenproblem: a and b differ in size");
  }
  if (!is_hermitian(a, 1e-8) || !is_hermitian(b, 1e-8)) {
    throw InvalidArgument("generalized eigenproblem: inputs must be Hermitian");
  }
  HermitianReduction out;
  const Eigen::LLT<Matrix> lb = checked_llt(b);
  // The pair is only meaningful for a Hermitian PD a as well.
  checked_llt(a);
  out.lower = lb.matrixL();
  const auto l = out.lower.triangularView<Eigen::Lower>();
  Matrix tmp = a.selfadjointView<Eigen::Lower>();
  l.solveInPlace(tmp);
  tmp.adjointInPlace();
  l.solveInPlace(tmp);
  out.reduced = hermitian_part(tmp);
  return out;
}

double rayleigh(const Matrix& a, const Matrix& b, const Vector& x) {
  const double num = x.dot(a * x).real();
  const double den = x.dot(b * x).real();
  return num / den;
}

}  // namespace

Matrix hermitian_part(const Matrix& a) {
  require_square(a, "hermitian_part");
  return (a + a.adjoint()) * 0.5;
}

bool is_hermitian(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.norm();
  return (a - a.adjoint()).norm() <= rel_tol * std::max(scale, 1e-300);
}

Matrix cholesky(const Matrix& a) {
  require_square(a, "cholesky");
  if (!is_hermitian(a, 1e-8)) {
    throw InvalidArgument("cholesky: input is not Hermitian");
  }
  Matrix l = checked_llt(hermitian_part(a)).matrixL();
  return l;
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
  require_square(a, "solve_linear");
  if (b.rows() != a.rows()) {
    throw DimensionMismatch("solve_linear: right-hand side has wrong row count");
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (!pivots.allFinite() || pivots.minCoeff() == 0.0) {
    throw SingularMatrix("solve_linear: zero pivot");
  }
  // Pivot growth stands in for a condition estimate; it is cheap for the
  // small systems solved per frequency bin.
  if (pivots.minCoeff() <=
      static_cast<double>(a.rows()) * std::numeric_limits<double>::epsilon() * pivots.maxCoeff()) {
    throw SingularMatrix("solve_linear: matrix is numerically singular");
  }
  return lu.solve(b);
}

void normalize_phase(Vector& v) {
  if (v.size() == 0) return;
  Eigen::Index best = 0;
  double best_abs = std::abs(v(0));
  for (Eigen::Index k = 1; k < v.size(); ++k) {
    const double m = std::abs(v(k));
    if (m > best_abs) {
      best_abs = m;
      best = k;
    }
  }
  if (best_abs == 0.0) return;
  const Complex rot = std::conj(v(best)) / best_abs;
  v *= rot;
  v(best) = Complex(std::abs(v(best)), 0.0);
}

Vector phase_normalized(Vector v) {
  normalize_phase(v);
  return v;
}

GeneralizedEigenpair gevd_top(const Matrix& a, const Matrix& b, int iters,
                              double tol) {
  return gevd_top(a, b, Vector::Ones(a.rows()), iters, tol);
}

GeneralizedEigenpair gevd_top(const Matrix& a, const Matrix& b,
                              const Vector& start, int iters, double tol) {
  if (iters < 1) throw InvalidArgument("gevd_top: iters must be >= 1");
  const HermitianReduction red = reduce_pair(a, b);
  if (start.size() != a.rows()) {
    throw DimensionMismatch("gevd_top: start vector has wrong length");
  }

  // Iterate on y = L^H x so the operator is Hermitian and the Rayleigh
  // quotient comes for free.
  Vector y = red.lower.adjoint() * start;
  double norm = y.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    y = Vector::Ones(a.rows());
    norm = y.norm();
  }
  y /= norm;

  double previous = std::numeric_limits<double>::quiet_NaN();
  Vector z(y.size());
  for (int k = 0; k < iters; ++k) {
    z.noalias() = red.reduced * y;
    const double quotient = y.dot(z).real();
    const double zn = z.norm();
    if (!(zn > 0.0)) break;
    y = z / zn;
    if (tol > 0.0 && std::abs(quotient - previous) <= tol * std::abs(quotient)) {
      break;
    }
    previous = quotient;
  }

  GeneralizedEigenpair out;
  out.vector =
      red.lower.adjoint().triangularView<Eigen::Upper>().solve(y);
  out.vector.normalize();
  normalize_phase(out.vector);
  out.value = rayleigh(a, b, out.vector);
  return out;
}

std::vector<GeneralizedEigenpair> gevd_full(const Matrix& a, const Matrix& b) {
  const HermitianReduction red = reduce_pair(a, b);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(red.reduced);
  if (eig.info() != Eigen::Success) {
    throw NotPositiveDefinite("gevd_full: eigensolver failed");
  }
  const Matrix x = red.lower.adjoint().triangularView<Eigen::Upper>().solve(
      eig.eigenvectors());
  const Eigen::Index n = a.rows();
  std::vector<GeneralizedEigenpair> out(static_cast<std::size_t>(n));
  // SelfAdjointEigenSolver sorts ascending.
  for (Eigen::Index k = 0; k < n; ++k) {
    auto& pair = out[static_cast<std::size_t>(k)];
    pair.value = eig.eigenvalues()(n - 1 - k);
    pair.vector = x.col(n - 1 - k);
    normalize_phase(pair.vector);
  }
  return out;
}

Matrix inv_sqrt(const Matrix& a) {
  require_square(a, "inv_sqrt");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(a));
  if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 0.0)) {
    throw NotPositiveDefinite("inv_sqrt: matrix is not positive definite");
  }
  const RealVector scale = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  const Matrix& u = eig.eigenvectors();
  return hermitian_part(u * scale.cast<Complex>().asDiagonal() * u.adjoint());
}

double log_abs_det(const Matrix& a) {
  require_square(a, "log_abs_det");
  Eigen::PartialPivLU<Matrix> lu(a);
  const auto& packed = lu.matrixLU();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < packed.rows(); ++k) {
    const double m = std::abs(packed(k, k));
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    acc += std::log(m);
  }
  return acc;
}

}  // namespace ive::linalg
