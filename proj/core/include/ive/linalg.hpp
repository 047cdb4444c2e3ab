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

// Dense complex kernels for Hermitian positive-definite pairs.
//
// Everything here is a pure function of its inputs and may be called
// concurrently from per-frequency workers.

#ifndef IVE_LINALG_HPP_
#define IVE_LINALG_HPP_

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace ive {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace linalg {

/// Default iteration count of the power method.
inline constexpr int kPowerIterations = 30;
/// Early exit when successive Rayleigh quotients agree to this relative
/// tolerance. Zero disables the early exit.
inline constexpr double kPowerTolerance = 1e-12;

struct GeneralizedEigenpair {
  double value = 0.0;
  Vector vector;
};

/// (A + A^H) / 2.
Matrix hermitian_part(const Matrix& a);

/// ||A - A^H||_F <= rel_tol * ||A||_F.
bool is_hermitian(const Matrix& a, double rel_tol = 1e-12);

/// Lower-triangular L with L L^H = a. The input is symmetrized first.
/// Throws NotPositiveDefinite when a pivot is not strictly positive.
Matrix cholesky(const Matrix& a);

/// Solves a x = b through a partially pivoted LU factorization.
/// Throws SingularMatrix when a is numerically singular.
Matrix solve_linear(const Matrix& a, const Matrix& b);

/// Rescales v by a unit complex number so that its largest-magnitude entry
/// (first one on ties) is real and nonnegative. Zero vectors are untouched.
void normalize_phase(Vector& v);
Vector phase_normalized(Vector v);

/// Top eigenpair of a x = lambda b x by power iteration on the Hermitian
/// reduction L^{-1} a L^{-H}, b = L L^H. The returned vector has unit
/// Euclidean norm and normalized phase; the value is the Rayleigh quotient
/// (x^H a x) / (x^H b x).
///
/// When the top eigenvalue is repeated any vector of the top eigenspace may
/// be returned. Each such vector is an equally good answer for the callers.
GeneralizedEigenpair gevd_top(const Matrix& a, const Matrix& b,
                              int iters = kPowerIterations,
                              double tol = kPowerTolerance);

/// Same, starting the iteration from `start` (given in the coordinates of
/// x). Warm starts make a handful of iterations enough once the outer
/// optimization settles.
GeneralizedEigenpair gevd_top(const Matrix& a, const Matrix& b,
                              const Vector& start,
                              int iters = kPowerIterations,
                              double tol = kPowerTolerance);

/// Complete generalized eigendecomposition, eigenvalues descending. Vectors
/// are b-orthonormal (X^H b X = I) with normalized phase.
std::vector<GeneralizedEigenpair> gevd_full(const Matrix& a, const Matrix& b);

/// The unique Hermitian positive-definite R with R a R = I.
Matrix inv_sqrt(const Matrix& a);

/// log |det a| from the LU diagonal, -infinity for an exactly singular a.
double log_abs_det(const Matrix& a);

}  // namespace linalg
}  // namespace ive

#endif  // IVE_LINALG_HPP_
