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

// Generalized Gaussian source prior and the auxiliary-function (MM)
// machinery built on it.

#ifndef IVE_SOURCE_MODEL_HPP_
#define IVE_SOURCE_MODEL_HPP_

#include <vector>

#include "ive/types.hpp"

namespace ive {

/// Contrast G(r) = (r / alpha_i)^beta + 2 F log alpha_i with 0 < beta < 2
/// (beta = 2 is admitted as the Gaussian limit).
struct GgdModel {
  double beta = 0.1;
  std::vector<double> alphas;
  int num_freqs = 1;

  GgdModel() = default;
  GgdModel(double beta, std::vector<double> alphas, int num_freqs);

  int num_sources() const { return static_cast<int>(alphas.size()); }

  double contrast(int i, double r) const;
  /// G'(r).
  double contrast_derivative(int i, double r) const;
};

/// Per-source, per-frame norms r_i(t) and MM weights phi_i(t).
struct AuxiliaryState {
  RealMatrix r;    // sources x frames
  RealMatrix phi;  // sources x frames
};

/// s_i(f, t) = w_i(f)^H x(f, t) for the first `count` columns of W
/// (count < 0 means K). Entry i is an F x T matrix.
std::vector<Matrix> source_signals(const Spectrogram& x, const DemixingSystem& w,
                                   int count = -1);

/// r_i(t) = sqrt(sum_f |s_i(f, t)|^2), unfloored.
RealMatrix aux_norms(const std::vector<Matrix>& signals);

/// Floors each row at max(1e-12 * max_t r_i(t), 1e-300).
RealMatrix floor_norms(RealMatrix r);

/// alpha_i = [(beta / 2F) mean_t r_i(t)^beta]^(1/beta).
std::vector<double> update_scales(const GgdModel& model, const RealMatrix& r);

/// phi_i(t) = (beta/2) / (alpha_i^beta r_i(t)^(2-beta)), unclipped.
RealMatrix raw_contrast_weights(const GgdModel& model, const RealMatrix& r);

/// Raw weights clipped row-wise at phi_clip * min_t phi_i(t). A non-finite
/// phi_clip disables clipping.
RealMatrix contrast_weights(const GgdModel& model, const RealMatrix& r,
                            double phi_clip = 1e5);

/// Surrogate g summed over frequencies:
///   sum_i w_i^H V_i w_i + tr(W_z^H V_z W_z) - 2 log |det W|.
/// Columns of W with an entry in covariances.source use it; the remaining
/// columns are charged against the noise covariance.
double surrogate_value(const DemixingSystem& w, const CovarianceSet& covariances);

/// Negative log-likelihood with the additive constant dropped:
///   (1/T) sum_i sum_t G(r_i(t)) + (1/T) sum_f sum_t ||z(f,t)||^2
///   - 2 sum_f log |det W(f)|.
/// The first model.num_sources() columns are super-Gaussian outputs; the
/// rest form the stationary Gaussian block z = W_z^H x.
double nll_value(const Spectrogram& x, const DemixingSystem& w, const GgdModel& model);

}  // namespace ive

#endif  // IVE_SOURCE_MODEL_HPP_
