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

// Signal-to-distortion scoring and variant benchmarking.

#ifndef IVE_EVALUATION_HPP_
#define IVE_EVALUATION_HPP_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ive/extraction.hpp"
#include "ive/stft.hpp"

namespace ive {

inline constexpr double kSdrCap = 80.0;

/// 10 log10(ref_energy / error_energy), capped at kSdrCap. Throws
/// ZeroReference when ref_energy is zero.
double sdr_from_energies(double ref_energy, double error_energy);

/// Plain energy-ratio SDR of an estimated spatial image.
double compute_sdr(const Waveform& est, const Waveform& ref);
double compute_sdr(const Spectrogram& est, const Spectrogram& ref);

struct SdrReport {
  std::vector<double> sdr;     // per reference
  double mean = 0.0;
  std::vector<int> assignment;  // reference i <- estimate assignment[i]
};

/// Best assignment of K references to distinct estimates out of N >= K by
/// exhaustive search, maximizing the mean SDR.
SdrReport match_and_score(const std::vector<Waveform>& est, const std::vector<Waveform>& ref);
SdrReport match_and_score(const std::vector<Spectrogram>& est,
                          const std::vector<Spectrogram>& ref);
/// Same, from a precomputed K x N table of SDRs.
SdrReport best_assignment(const RealMatrix& sdr_table);

/// Scores the spatial-image estimates of one iteration.
using ImageScorer = std::function<SdrReport(const std::vector<Spectrogram>& images)>;

struct BenchRow {
  std::string variant;
  int iteration = 0;
  double wall_seconds = 0.0;
  double g0 = 0.0;
  SdrReport sdr;
};

struct BenchSummary {
  std::string variant;
  int iterations = 0;
  double total_seconds = 0.0;
  double seconds_per_iteration = 0.0;
  /// total_seconds / signal duration.
  double rtf = 0.0;
  double final_sdr_mean = 0.0;
};

struct BenchResult {
  int num_sources = 0;
  double signal_seconds = 0.0;
  std::vector<BenchRow> rows;
  std::vector<BenchSummary> summaries;
};

/// Runs every configuration on the same mixture, one after the other, and
/// scores the projection-back images after each iteration. Wall times come
/// from the extraction log and exclude scoring.
BenchResult bench_run(const Spectrogram& x, const std::vector<ExtractionConfig>& configs,
                      const ImageScorer& scorer, double signal_seconds,
                      const SteeringSet* steering = nullptr);

inline constexpr const char* kBenchCsvVersion = "ive-bench-csv v1";

/// variant,iteration,wall_seconds,g0,sdr_mean,sdr_1..sdr_K preceded by a
/// '#' header comment naming the schema version.
void write_bench_csv(std::ostream& os, const BenchResult& result);
std::string bench_summary_json(const BenchResult& result);

}  // namespace ive

#endif  // IVE_EVALUATION_HPP_
