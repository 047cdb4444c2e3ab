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

#ifndef IVE_TYPES_HPP_
#define IVE_TYPES_HPP_

#include <vector>

#include "ive/linalg.hpp"

namespace ive {

/// Multichannel STFT coefficients x(f, t) in C^M. One M x T matrix per
/// frequency bin; column t is the observation vector of frame t.
struct Spectrogram {
  std::vector<Matrix> bins;

  Spectrogram() = default;
  Spectrogram(int num_freqs, int num_frames, int num_channels);

  int num_freqs() const { return static_cast<int>(bins.size()); }
  int num_frames() const { return bins.empty() ? 0 : static_cast<int>(bins[0].cols()); }
  int num_channels() const { return bins.empty() ? 0 : static_cast<int>(bins[0].rows()); }

  /// Sum of |x|^2 over every entry.
  double energy() const;

  Spectrogram& operator+=(const Spectrogram& other);
  Spectrogram& operator-=(const Spectrogram& other);
  Spectrogram& operator*=(double scale);
};

Spectrogram operator+(Spectrogram a, const Spectrogram& b);
Spectrogram operator-(Spectrogram a, const Spectrogram& b);

/// Per-frequency demixing matrices W(f) = [w_1, ..., w_K, W_z].
class DemixingSystem {
 public:
  DemixingSystem() = default;
  /// Initialized to W(f) = -I.
  DemixingSystem(int num_freqs, int num_channels, int num_sources);

  int num_freqs() const { return static_cast<int>(w_.size()); }
  int num_channels() const { return num_channels_; }
  int num_sources() const { return num_sources_; }
  int noise_dim() const { return num_channels_ - num_sources_; }

  Matrix& operator[](int f) { return w_[static_cast<std::size_t>(f)]; }
  const Matrix& operator[](int f) const { return w_[static_cast<std::size_t>(f)]; }

  auto source_filter(int f, int i) { return (*this)[f].col(i); }
  auto source_filter(int f, int i) const { return (*this)[f].col(i); }
  auto source_block(int f) { return (*this)[f].leftCols(num_sources_); }
  auto source_block(int f) const { return (*this)[f].leftCols(num_sources_); }
  auto noise_block(int f) { return (*this)[f].rightCols(noise_dim()); }
  auto noise_block(int f) const { return (*this)[f].rightCols(noise_dim()); }

 private:
  int num_channels_ = 0;
  int num_sources_ = 0;
  std::vector<Matrix> w_;
};

/// Weighted covariances V_1(f), ..., V_K(f) and the noise covariance V_z(f).
struct CovarianceSet {
  std::vector<std::vector<Matrix>> source;  // [f][i]
  std::vector<Matrix> noise;                // [f]

  int num_freqs() const { return static_cast<int>(noise.size()); }
};

/// Known unit-norm steering vectors A_1(f) = [a_1(f), ..., a_L(f)].
struct SteeringSet {
  std::vector<Matrix> a;  // [f], each M x L

  int num_freqs() const { return static_cast<int>(a.size()); }
  int known() const { return a.empty() ? 0 : static_cast<int>(a[0].cols()); }

  /// Keeps the first `count` columns.
  SteeringSet leading(int count) const;
};

/// Selector [e_first, ..., e_{first+count-1}] of size dim x count.
Matrix selector(int dim, int first, int count);

}  // namespace ive

#endif  // IVE_TYPES_HPP_
