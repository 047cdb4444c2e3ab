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

// Per-frequency block-coordinate updates of the demixing matrix.
//
// Every routine works on one frequency bin: W is the M x M demixing
// matrix [w_1, ..., w_K, W_z], V_i the weighted covariance of source i and
// V_z the (unweighted) mixture covariance. Indices are zero-based.

#ifndef IVE_UPDATES_HPP_
#define IVE_UPDATES_HPP_

#include <optional>
#include <vector>

#include "ive/linalg.hpp"
#include "ive/types.hpp"

namespace ive {

/// How top generalized eigenvectors are obtained.
struct EigenOptions {
  int power_iters = linalg::kPowerIterations;
  double power_tol = linalg::kPowerTolerance;
  /// Use the full decomposition instead of the power method.
  bool exact = false;
};

/// u = (W^H V_i)^{-1} e_i, w_i = u (u^H V_i u)^{-1/2}.
Vector ip1_source_update(const Matrix& w, const Matrix& v, int i);

/// W_z = [(W_s^H V_z E_s)^{-1} (W_s^H V_z E_z); -I], the noise block
/// satisfying W_s^H V_z W_z = 0 with its lower block fixed to -I.
Matrix oc_noise_update(const Matrix& w, const Matrix& vz, int num_sources);

/// The OC noise block rescaled so that W_z^H V_z W_z = I. Given W_s this is
/// a minimizer of tr(W_z^H V_z W_z) - 2 log |det W| over W_z.
Matrix complete_noise_block(const Matrix& w, const Matrix& vz, int num_sources);

struct SourceUpdate {
  Vector w;
  double lambda = 0.0;
  /// Only filled by the variants that also solve for the noise block.
  std::optional<Matrix> noise_block;
};

/// K = 1: w_1 from V_z u = lambda_max V_1 u, w_1 = u (u^H V_1 u)^{-1/2}.
/// `warm` seeds the power method. With `with_noise_block` the full
/// decomposition is used and W_z = U_z (U_z^H V_z U_z)^{-1/2} is returned
/// with U_z the remaining eigenvectors.
SourceUpdate ip2_k1_update(const Matrix& v1, const Matrix& vz, const EigenOptions& opts,
                           const Vector* warm = nullptr, bool with_noise_block = false);

/// 2 <= K < M: jointly optimal (w_i, W_z) through the pair
/// G_i b = lambda_max G_z b with P_l = (W^H V_l)^{-1} [e_i, E_z] and
/// G_l = P_l^H V_l P_l. Only w_i is produced unless `with_noise_block`, in
/// which case all generalized eigenvectors are computed and
/// W_z = P_z B_z (B_z^H G_z B_z)^{-1/2}.
SourceUpdate ip2_pair_update(const Matrix& w, const Matrix& vi, const Matrix& vz, int i,
                             int num_sources, bool with_noise_block, const EigenOptions& opts,
                             bool warm_start = true);

/// LCMV beamformer w_i = V_i^{-1} A_1 (A_1^H V_i^{-1} A_1)^{-1} e_i.
Vector lcmv_update(const Matrix& vi, const Matrix& a1, int i);

/// W_2' = [A_1, E_2]^{-H} E_2 and the channel order used to build E_2.
/// When [A_1, E_2] is singular the coordinates kept by E_2 are chosen by
/// partial pivoting on A_1 and `permuted` is set.
struct ReducedBasis {
  Matrix basis;                 // M x (M - L)
  std::vector<int> complement;  // channels selected by E_2
  bool permuted = false;
};

ReducedBasis semi_basis(const Matrix& a1);

/// V_bar = W_2'^H V W_2' followed by trace loading.
Matrix reduce_covariance(const Matrix& basis, const Matrix& v, double trace_loading);

/// One barred BCD step for source j (0-based among the K - L unknown
/// sources). Returns the barred filter w_bar_j; the full-size filter is
/// basis * w_bar_j.
SourceUpdate semi_ive_update(const Matrix& wbar, const Matrix& vbar_j, const Matrix& vbar_z,
                             int j, int num_unknown, const EigenOptions& opts);

/// Barred noise block from the orthogonal constraint on the reduced problem; -I when every
/// target is known. The full-size noise block is basis * W_bar_z.
Matrix semi_noise_completion(const Matrix& wbar, const Matrix& vbar_z, int num_unknown);

/// Largest of ||W^H V_i w_i - e_i|| over the weighted columns and
/// ||W^H V_z W_z - E_z||_F over the remaining block.
double stationarity_residual(const Matrix& w, const std::vector<Matrix>& vs, const Matrix& vz);

/// Per-frequency stationarity residuals of a whole system.
std::vector<double> stationarity_residual(const DemixingSystem& w, const CovarianceSet& cov);

/// Adds trace_loading * tr(V) * I in place.
void load_trace(Matrix& v, double trace_loading);

}  // namespace ive

#endif  // IVE_UPDATES_HPP_
