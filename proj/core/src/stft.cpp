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

#include "ive/stft.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "ive/errors.hpp"

namespace ive {
namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int lead_pad(const StftConfig& cfg) { return cfg.frame_len - cfg.hop; }

}  // namespace

void StftConfig::validate() const {
  if (!power_of_two(frame_len) || frame_len < 2) {
    throw InvalidArgument("frame length must be a power of two");
  }
  if (hop < 1 || frame_len % hop != 0 || frame_len / hop < 2) {
    throw InvalidArgument("hop must divide the frame length with at least 2x overlap");
  }
  if (window != "sqrt-hann") throw InvalidArgument("unsupported window '" + window + "'");
}

RealVector sqrt_hann(int n) {
  RealVector w(n);
  for (int k = 0; k < n; ++k) {
    w(k) = std::sqrt(0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / n));
  }
  return w;
}

Spectrogram analyze(const Waveform& wave, const StftConfig& cfg) {
  cfg.validate();
  const int n = wave.num_samples();
  if (n < cfg.frame_len) throw TooShort("signal is shorter than one frame");
  const int pad = lead_pad(cfg);
  const int frames = (n + pad + cfg.hop - 1) / cfg.hop;
  const int channels = wave.num_channels();
  const int bins = cfg.num_freqs();
  const RealVector win = sqrt_hann(cfg.frame_len);

  Spectrogram out(bins, frames, channels);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buf(static_cast<std::size_t>(cfg.frame_len));
  std::vector<std::complex<double>> spec;
  for (int m = 0; m < channels; ++m) {
    for (int t = 0; t < frames; ++t) {
      const int start = t * cfg.hop - pad;
      for (int k = 0; k < cfg.frame_len; ++k) {
        const int s = start + k;
        buf[static_cast<std::size_t>(k)] = (s >= 0 && s < n) ? wave.samples(m, s) * win(k) : 0.0;
      }
      fft.fwd(spec, buf);
      for (int f = 0; f < bins; ++f) out.bins[static_cast<std::size_t>(f)](m, t) = spec[static_cast<std::size_t>(f)];
    }
  }
  return out;
}

Waveform synthesize(const Spectrogram& spec, const StftConfig& cfg, int sample_rate,
                    int num_samples) {
  cfg.validate();
  if (spec.num_freqs() != cfg.num_freqs()) {
    throw ConfigMismatch("spectrogram has " + std::to_string(spec.num_freqs()) +
                         " bins, config expects " + std::to_string(cfg.num_freqs()));
  }
  const int frames = spec.num_frames();
  const int channels = spec.num_channels();
  const int pad = lead_pad(cfg);
  const int covered = frames * cfg.hop;
  if (num_samples < 0) num_samples = covered;
  if (num_samples > covered) throw ConfigMismatch("requested more samples than the frames cover");

  const RealVector win = sqrt_hann(cfg.frame_len);
  RealVector norm = RealVector::Zero(covered);
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < cfg.frame_len; ++k) {
      const int s = t * cfg.hop - pad + k;
      if (s >= 0 && s < covered) norm(s) += win(k) * win(k);
    }
  }

  Waveform out(sample_rate, channels, covered);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> half(static_cast<std::size_t>(cfg.num_freqs()));
  std::vector<double> frame;
  for (int m = 0; m < channels; ++m) {
    for (int t = 0; t < frames; ++t) {
      for (int f = 0; f < cfg.num_freqs(); ++f) half[static_cast<std::size_t>(f)] = spec.bins[static_cast<std::size_t>(f)](m, t);
      fft.inv(frame, half, cfg.frame_len);
      for (int k = 0; k < cfg.frame_len; ++k) {
        const int s = t * cfg.hop - pad + k;
        if (s >= 0 && s < covered) out.samples(m, s) += frame[static_cast<std::size_t>(k)] * win(k);
      }
    }
  }
  for (int s = 0; s < covered; ++s) {
    if (norm(s) > 0.0) out.samples.col(s) /= norm(s);
  }
  out.samples.conservativeResize(Eigen::NoChange, num_samples);
  return out;
}

}  // namespace ive
