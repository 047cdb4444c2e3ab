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

// Synthetic extraction scenarios with known spatial images.
//
// Two generators are provided. make_scenario works on waveforms (used by
// the command-line tool and the end-to-end quality checks), while
// make_spectral_scenario draws STFT-domain data directly from the
// frequency-wise mixing model, which is exact for every extraction variant.

#ifndef IVE_SCENARIO_HPP_
#define IVE_SCENARIO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ive/stft.hpp"
#include "ive/types.hpp"

namespace ive {

enum class MixingMode { kInstantaneous, kFir, kIdentity };

std::string to_string(MixingMode mode);
/// "inst", "fir" or "identity".
MixingMode parse_mixing(const std::string& name);

/// Gaussian carrier times a |Laplace| envelope held constant over blocks of
/// `block` samples. Row i is source i.
RealMatrix sample_sources(int count, int num_samples, std::uint64_t seed, int block = 4096);

/// Excess kurtosis of a zero-mean sample.
double excess_kurtosis(const RealVector& x);

struct ScenarioConfig {
  int sources = 1;
  int mics = 4;
  int noises = 1;
  /// +inf removes the noise entirely.
  double snr_db = 0.0;
  double duration = 10.0;
  int sample_rate = 16000;
  MixingMode mixing = MixingMode::kInstantaneous;
  std::uint64_t seed = 0;
  int fir_taps = 8;
  double max_condition = 100.0;

  void validate() const;
};

struct Scenario {
  ScenarioConfig config;
  Waveform mixture;
  std::vector<Waveform> images;        // one per target source
  std::vector<Waveform> noise_images;  // one per noise source, after SNR scaling
  /// Number of mixing draws rejected for exceeding max_condition.
  int rejected_draws = 0;
};

/// Mean over targets of the channel-averaged image variance over the sum of
/// the channel-averaged noise image variances, in dB.
double scenario_snr_db(const std::vector<Waveform>& images, const std::vector<Waveform>& noise);

Scenario make_scenario(const ScenarioConfig& cfg);

struct SpectralScenarioConfig {
  int sources = 1;
  int mics = 2;
  int noises = 1;
  int num_freqs = 64;
  int num_frames = 200;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  bool identity_mixing = false;
  double max_condition = 100.0;
};

struct SpectralScenario {
  Spectrogram mixture;
  std::vector<Spectrogram> images;
  Spectrogram noise;
  /// True unit-norm steering vectors of the targets.
  SteeringSet steering;
};

/// A(f) with i.i.d. complex Gaussian entries and unit columns per bin,
/// targets s_i(f,t) = e_i(t) n(f,t) with a |Laplace| frame envelope and
/// stationary complex Gaussian noise sources.
SpectralScenario make_spectral_scenario(const SpectralScenarioConfig& cfg);

/// Top eigenvector of (1/T) sum_t x x^H per bin, unit norm, phase
/// normalized. Throws ZeroImage on a silent bin.
std::vector<Vector> estimate_steering(const Spectrogram& image);

/// Steering set for the first `count` images.
SteeringSet steering_from_images(const std::vector<Spectrogram>& images, int count);

/// Writes mixture.wav, image_<i>.wav (1-based), steering.json and
/// scenario.json into `dir`, creating it when needed.
void save_scenario(const std::string& dir, const Scenario& scenario, const StftConfig& stft);

struct LoadedScenario {
  ScenarioConfig config;
  StftConfig stft;
  Waveform mixture;
  std::vector<Waveform> images;
};

LoadedScenario load_scenario(const std::string& dir);

void save_steering(const std::string& path, const SteeringSet& steering);
SteeringSet load_steering(const std::string& path);

}  // namespace ive

#endif  // IVE_SCENARIO_HPP_
