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

// Multichannel short-time Fourier transform with a square-root Hann window
// used for both analysis and synthesis.

#ifndef IVE_STFT_HPP_
#define IVE_STFT_HPP_

#include <string>

#include "ive/types.hpp"

namespace ive {

/// Real multichannel signal, one row per channel.
struct Waveform {
  int sample_rate = 16000;
  RealMatrix samples;

  Waveform() = default;
  Waveform(int rate, int channels, int length)
      : sample_rate(rate), samples(RealMatrix::Zero(channels, length)) {}

  int num_channels() const { return static_cast<int>(samples.rows()); }
  int num_samples() const { return static_cast<int>(samples.cols()); }
  double duration() const { return static_cast<double>(num_samples()) / sample_rate; }
};

struct StftConfig {
  int frame_len = 4096;
  int hop = 1024;
  std::string window = "sqrt-hann";

  int num_freqs() const { return frame_len / 2 + 1; }
  /// frame_len a power of two, hop dividing it with at least 2x overlap.
  void validate() const;
};

/// sqrt of the periodic Hann window of length n.
RealVector sqrt_hann(int n);

/// Frames start frame_len - hop samples before the signal so every sample
/// is covered by the same number of frames; the tail is zero-padded.
/// Throws TooShort when the signal is shorter than one frame.
Spectrogram analyze(const Waveform& wave, const StftConfig& cfg);

/// Weighted overlap-add inverse of analyze. `num_samples` < 0 keeps every
/// sample the frames cover. Throws ConfigMismatch when the bin count does
/// not match the config.
Waveform synthesize(const Spectrogram& spec, const StftConfig& cfg, int sample_rate = 16000,
                    int num_samples = -1);

}  // namespace ive

#endif  // IVE_STFT_HPP_
