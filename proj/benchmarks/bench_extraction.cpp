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

// Micro and per-iteration benchmarks for the extraction variants.

#include <benchmark/benchmark.h>

#include <random>

#include "ive/extraction.hpp"
#include "ive/linalg.hpp"
#include "ive/scenario.hpp"
#include "ive/stft.hpp"

namespace {

ive::Matrix random_hpd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ive::Matrix a(n, 2 * n);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) a(i, j) = ive::Complex(g(rng), g(rng));
  }
  return a * a.adjoint() / static_cast<double>(a.cols()) + ive::Matrix::Identity(n, n);
}

void BM_GevdTopPower(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const ive::Matrix a = random_hpd(n, rng);
  const ive::Matrix b = random_hpd(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ive::linalg::gevd_top(a, b));
}
BENCHMARK(BM_GevdTopPower)->DenseRange(2, 8, 2);

void BM_GevdFull(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const ive::Matrix a = random_hpd(n, rng);
  const ive::Matrix b = random_hpd(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ive::linalg::gevd_full(a, b));
}
BENCHMARK(BM_GevdFull)->DenseRange(2, 8, 2);

void BM_SolveLinear(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  const ive::Matrix a = random_hpd(n, rng);
  const ive::Matrix b = random_hpd(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ive::linalg::solve_linear(a, b));
}
BENCHMARK(BM_SolveLinear)->DenseRange(2, 8, 2);

void BM_WeightedCovariances(benchmark::State& state) {
  ive::SpectralScenarioConfig cfg;
  cfg.sources = 1;
  cfg.mics = static_cast<int>(state.range(0));
  cfg.noises = cfg.mics - 1;
  cfg.num_freqs = 129;
  cfg.num_frames = 500;
  const auto sc = ive::make_spectral_scenario(cfg);
  const ive::RealMatrix phi = ive::RealMatrix::Ones(1, cfg.num_frames);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ive::weighted_covariances(sc.mixture, phi, 1e-3));
  }
}
BENCHMARK(BM_WeightedCovariances)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

// One full run per state iteration; reported time is per outer iteration.
void BM_Extraction(benchmark::State& state, ive::Variant variant) {
  const int k = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  ive::SpectralScenarioConfig sc_cfg;
  sc_cfg.sources = k;
  sc_cfg.mics = m;
  sc_cfg.noises = m - k;
  sc_cfg.num_freqs = 129;
  sc_cfg.num_frames = 500;
  sc_cfg.seed = 11;
  const auto sc = ive::make_spectral_scenario(sc_cfg);
  const ive::SteeringSet steering = sc.steering.leading(1);

  ive::ExtractionConfig cfg;
  cfg.variant = variant;
  cfg.num_sources = k;
  cfg.iterations = 10;
  cfg.record_objective = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ive::run_extraction(sc.mixture, cfg, &steering));
  }
  state.SetItemsProcessed(state.iterations() * cfg.iterations);
}
BENCHMARK_CAPTURE(BM_Extraction, iva_ip1, ive::Variant::kIvaIp1)
    ->ArgsProduct({{1, 2, 3}, {8}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Extraction, ive_ip1, ive::Variant::kIveIp1)
    ->ArgsProduct({{1, 2, 3}, {8}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Extraction, ive_ip2_old, ive::Variant::kIveIp2Old)
    ->ArgsProduct({{1, 2, 3}, {8}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Extraction, ive_ip2_new, ive::Variant::kIveIp2New)
    ->ArgsProduct({{1, 2, 3}, {8}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Extraction, semi_ive, ive::Variant::kSemiIve)
    ->ArgsProduct({{1, 2, 3}, {8}})
    ->Unit(benchmark::kMillisecond);

void BM_StftAnalyze(benchmark::State& state) {
  ive::Waveform w(16000, 4, 16000 * 5);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int c = 0; c < w.num_channels(); ++c) {
    for (int n = 0; n < w.num_samples(); ++n) w.samples(c, n) = g(rng);
  }
  ive::StftConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(ive::analyze(w, cfg));
}
BENCHMARK(BM_StftAnalyze)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
