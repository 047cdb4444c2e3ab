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

#include "ive/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "ive/errors.hpp"

namespace ive {
namespace {

template <class T, class Sdr>
SdrReport score_all(const std::vector<T>& est, const std::vector<T>& ref, Sdr sdr) {
  if (est.size() < ref.size()) throw InvalidArgument("fewer estimates than references");
  RealMatrix table(static_cast<Eigen::Index>(ref.size()), static_cast<Eigen::Index>(est.size()));
  for (std::size_t i = 0; i < ref.size(); ++i) {
    for (std::size_t n = 0; n < est.size(); ++n) {
      table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)) = sdr(est[n], ref[i]);
    }
  }
  return best_assignment(table);
}

}  // namespace

double sdr_from_energies(double ref_energy, double error_energy) {
  if (!(ref_energy > 0.0)) throw ZeroReference("reference image has zero energy");
  if (error_energy <= 0.0) return kSdrCap;
  return std::min(kSdrCap, 10.0 * std::log10(ref_energy / error_energy));
}

double compute_sdr(const Waveform& est, const Waveform& ref) {
  if (est.samples.rows() != ref.samples.rows() || est.samples.cols() != ref.samples.cols()) {
    throw DimensionMismatch("compute_sdr: shapes differ");
  }
  return sdr_from_energies(ref.samples.squaredNorm(), (ref.samples - est.samples).squaredNorm());
}

double compute_sdr(const Spectrogram& est, const Spectrogram& ref) {
  if (est.num_freqs() != ref.num_freqs() || est.num_frames() != ref.num_frames() ||
      est.num_channels() != ref.num_channels()) {
    throw DimensionMismatch("compute_sdr: shapes differ");
  }
  double err = 0.0;
  for (std::size_t f = 0; f < ref.bins.size(); ++f) err += (ref.bins[f] - est.bins[f]).squaredNorm();
  return sdr_from_energies(ref.energy(), err);
}

SdrReport best_assignment(const RealMatrix& table) {
  const int k = static_cast<int>(table.rows());
  const int n = static_cast<int>(table.cols());
  if (k > n) throw InvalidArgument("fewer estimates than references");
  SdrReport best;
  best.mean = -std::numeric_limits<double>::infinity();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  // Every K-permutation appears as a prefix of some full permutation; the
  // suffix is kept sorted so each prefix is visited once.
  do {
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += table(i, perm[static_cast<std::size_t>(i)]);
    const double mean = k > 0 ? sum / k : 0.0;
    if (mean > best.mean) {
      best.mean = mean;
      best.assignment.assign(perm.begin(), perm.begin() + k);
    }
    std::reverse(perm.begin() + k, perm.end());
  } while (std::next_permutation(perm.begin(), perm.end()));
  best.sdr.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) best.sdr[static_cast<std::size_t>(i)] = table(i, best.assignment[static_cast<std::size_t>(i)]);
  return best;
}

SdrReport match_and_score(const std::vector<Waveform>& est, const std::vector<Waveform>& ref) {
  return score_all(est, ref, [](const Waveform& e, const Waveform& r) { return compute_sdr(e, r); });
}

SdrReport match_and_score(const std::vector<Spectrogram>& est,
                          const std::vector<Spectrogram>& ref) {
  return score_all(est, ref,
                   [](const Spectrogram& e, const Spectrogram& r) { return compute_sdr(e, r); });
}

BenchResult bench_run(const Spectrogram& x, const std::vector<ExtractionConfig>& configs,
                      const ImageScorer& scorer, double signal_seconds,
                      const SteeringSet* steering) {
  BenchResult out;
  out.signal_seconds = signal_seconds;
  for (const auto& base : configs) {
    ExtractionConfig cfg = base;
    cfg.record_objective = true;
    cfg.record_stationarity = false;
    out.num_sources = std::max(out.num_sources, cfg.num_sources);

    std::vector<SdrReport> scores;
    ExtractionHooks hooks;
    const bool all_outputs = cfg.variant == Variant::kIvaIp1;
    hooks.on_iteration = [&](int, const DemixingSystem& w) {
      const int count = all_outputs ? w.num_channels() : w.num_sources();
      scores.push_back(scorer(projection_back(x, w, count)));
    };
    const ExtractionResult res =
        run_extraction(x, cfg, cfg.variant == Variant::kSemiIve ? steering : nullptr, hooks);

    const std::string name(to_string(cfg.variant));
    for (std::size_t k = 0; k < res.log.records.size(); ++k) {
      const auto& rec = res.log.records[k];
      out.rows.push_back(BenchRow{name, rec.iteration, rec.wall_seconds, rec.nll, scores[k]});
    }
    BenchSummary s;
    s.variant = name;
    s.iterations = static_cast<int>(res.log.records.size());
    s.total_seconds = res.log.records.empty() ? 0.0 : res.log.records.back().wall_seconds;
    s.seconds_per_iteration = s.iterations > 0 ? s.total_seconds / s.iterations : 0.0;
    s.rtf = signal_seconds > 0.0 ? s.total_seconds / signal_seconds : 0.0;
    s.final_sdr_mean = scores.empty() ? 0.0 : scores.back().mean;
    out.summaries.push_back(s);
  }
  return out;
}

void write_bench_csv(std::ostream& os, const BenchResult& result) {
  os << "# " << kBenchCsvVersion << '\n';
  os << "variant,iteration,wall_seconds,g0,sdr_mean";
  for (int i = 1; i <= result.num_sources; ++i) os << ",sdr_" << i;
  os << '\n';
  os << std::setprecision(17);
  for (const auto& r : result.rows) {
    os << r.variant << ',' << r.iteration << ',' << r.wall_seconds << ',' << r.g0 << ','
       << r.sdr.mean;
    for (int i = 0; i < result.num_sources; ++i) {
      os << ',';
      if (i < static_cast<int>(r.sdr.sdr.size())) os << r.sdr.sdr[static_cast<std::size_t>(i)];
    }
    os << '\n';
  }
}

std::string bench_summary_json(const BenchResult& result) {
  nlohmann::json j;
  j["schema"] = kBenchCsvVersion;
  j["signal_seconds"] = result.signal_seconds;
  j["num_sources"] = result.num_sources;
  nlohmann::json variants = nlohmann::json::array();
  for (const auto& s : result.summaries) {
    variants.push_back({{"variant", s.variant},
                        {"iterations", s.iterations},
                        {"total_seconds", s.total_seconds},
                        {"seconds_per_iteration", s.seconds_per_iteration},
                        {"rtf", s.rtf},
                        {"final_sdr_mean", s.final_sdr_mean}});
  }
  j["variants"] = variants;
  return j.dump(2);
}

}  // namespace ive
