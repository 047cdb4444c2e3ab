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

// The auxiliary-function outer loop and the variant dispatch.
//
// One outer iteration recomputes the source norms, scales, MM weights and
// weighted covariances from the current demixing matrices and then runs the
// selected block-coordinate update independently on every frequency bin.

#ifndef IVE_EXTRACTION_HPP_
#define IVE_EXTRACTION_HPP_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ive/source_model.hpp"
#include "ive/types.hpp"
#include "ive/updates.hpp"

namespace ive {

enum class Variant { kIvaIp1, kIveIp1, kIveIp2Old, kIveIp2New, kSemiIve };

std::string_view to_string(Variant v);
/// Accepts the CLI spellings (iva-ip1, ive-ip1, ive-ip2-old, ive-ip2-new,
/// semi-ive). Throws InvalidArgument otherwise.
Variant parse_variant(std::string_view name);

struct ExtractionConfig {
  Variant variant = Variant::kIveIp2New;
  int num_sources = 1;
  int iterations = 50;
  int power_iters = linalg::kPowerIterations;
  double power_tol = linalg::kPowerTolerance;
  /// Replace the power method by the full generalized eigendecomposition.
  bool exact_eigensolver = false;
  double trace_loading = 1e-3;
  double phi_clip = 1e5;
  double beta = 0.1;
  /// Stop once the relative decrease of the negative log-likelihood stays
  /// below stop_tol for stop_window consecutive iterations. 0 disables.
  double stop_tol = 0.0;
  int stop_window = 3;
  int threads = 1;
  /// Evaluate surrogate, likelihood and stationarity after each iteration.
  /// The evaluation is excluded from the wall-time column.
  bool record_objective = true;
  /// Also evaluate the stationarity residual (costs one extra weight and
  /// covariance pass per iteration).
  bool record_stationarity = true;
  /// iva-ip1 only: model the last M - K outputs as stationary Gaussian
  /// (V_i = V_z) instead of super-Gaussian.
  bool iva_gaussian_noise = false;

  void validate() const;
  EigenOptions eigen_options() const;
};

struct TrajectoryRecord {
  int iteration = 0;
  double surrogate = 0.0;
  double nll = 0.0;
  double wall_seconds = 0.0;
  double stationarity = 0.0;
};

struct TrajectoryLog {
  std::vector<TrajectoryRecord> records;
  bool stopped_early = false;
};

/// Passed to the per-update hook; covariances are the loaded ones used by
/// the update.
struct InnerStep {
  enum class Kind { kSource, kNoise };
  int iteration;
  int frequency;
  int index;
  Kind kind;
  const Matrix& w;
  const std::vector<Matrix>& source_covariances;
  const Matrix& noise_covariance;
};

struct ExtractionHooks {
  /// Called after every outer iteration with the demixing system whose
  /// noise block has been completed for projection back.
  std::function<void(int iteration, const DemixingSystem& completed)> on_iteration;
  /// Called after every per-frequency block update. Must be thread-safe
  /// when threads > 1.
  std::function<void(const InnerStep&)> on_inner_step;
};

struct ExtractionResult {
  /// Final demixing system with its noise block completed.
  DemixingSystem demixing;
  /// Projection-back spatial images: K of them, or all M for iva-ip1
  /// (the caller picks K).
  std::vector<Spectrogram> images;
  TrajectoryLog log;
  std::vector<double> alphas;
  /// Frequency bins where the semiblind basis needed a channel permutation.
  std::vector<int> permuted_bins;
};

/// V_z(f) = (1/T) sum_t x x^H plus trace loading.
Matrix mixture_covariance(const Matrix& bin, double trace_loading);

/// V_i(f) = (1/T) sum_t phi_i(t) x x^H plus trace loading, for each row of
/// phi; V_z alongside. Throws AllFramesZero on an all-zero mixture.
CovarianceSet weighted_covariances(const Spectrogram& x, const RealMatrix& phi,
                                   double trace_loading, int threads = 1);

/// x_i(f, t) = (W(f)^{-H} e_i)(w_i(f)^H x(f, t)) for the first `count`
/// columns (count < 0 means K).
std::vector<Spectrogram> projection_back(const Spectrogram& x, const DemixingSystem& w,
                                         int count = -1);

/// Runs the configured variant. semi-ive needs steering with 1 <= L <= K.
ExtractionResult run_extraction(const Spectrogram& x, const ExtractionConfig& config,
                                const SteeringSet* steering = nullptr,
                                const ExtractionHooks& hooks = {});

}  // namespace ive

#endif  // IVE_EXTRACTION_HPP_
