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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <utility>

#include "ive/errors.hpp"
#include "ive/evaluation.hpp"
#include "ive/extraction.hpp"
#include "ive/scenario.hpp"
#include "ive/source_model.hpp"
#include "ive/updates.hpp"
#include "test_util.hpp"

namespace ive {
namespace {

SpectralScenario scenario(int k, int m, std::uint64_t seed, int freqs = 16, int frames = 120) {
  SpectralScenarioConfig cfg;
  cfg.sources = k;
  cfg.mics = m;
  cfg.noises = m - k;
  cfg.num_freqs = freqs;
  cfg.num_frames = frames;
  cfg.seed = seed;
  return make_spectral_scenario(cfg);
}

// Stabilizers off: the plain MM algorithm.
ExtractionConfig plain_config(Variant v, int k, int iterations) {
  ExtractionConfig c;
  c.variant = v;
  c.num_sources = k;
  c.iterations = iterations;
  c.beta = 1.0;
  c.trace_loading = 0.0;
  c.phi_clip = std::numeric_limits<double>::infinity();
  return c;
}

double bin_surrogate(const Matrix& w, const std::vector<Matrix>& vs, const Matrix& vz) {
  double g = 0.0;
  const int weighted = static_cast<int>(vs.size());
  for (int i = 0; i < weighted; ++i) g += w.col(i).dot(vs[i] * w.col(i)).real();
  const auto rest = w.rightCols(w.cols() - weighted);
  g += (rest.adjoint() * vz * rest).trace().real();
  return g - 2.0 * linalg::log_abs_det(w);
}

Matrix source_block(const DemixingSystem& w, int f) {
  Matrix s = w.source_block(f);
  for (int i = 0; i < s.cols(); ++i) {
    Vector c = s.col(i);
    linalg::normalize_phase(c);
    s.col(i) = c;
  }
  return s;
}

TEST(ExtractionConfig, Validation) {
  ExtractionConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.beta, 0.1);
  EXPECT_EQ(c.power_iters, 30);
  EXPECT_EQ(c.trace_loading, 1e-3);
  EXPECT_EQ(c.phi_clip, 1e5);
  auto bad = [](auto mutate) {
    ExtractionConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(bad([](auto& c) { c.num_sources = 0; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](auto& c) { c.iterations = 0; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](auto& c) { c.beta = 0.0; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](auto& c) { c.beta = 2.5; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](auto& c) { c.phi_clip = 1.0; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](auto& c) { c.threads = 0; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](auto& c) { c.power_iters = 0; }).validate(), InvalidArgument);
}

TEST(Variant, NamesRoundTrip) {
  for (Variant v : {Variant::kIvaIp1, Variant::kIveIp1, Variant::kIveIp2Old, Variant::kIveIp2New,
                    Variant::kSemiIve}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
  EXPECT_THROW(parse_variant("ive-ip3"), InvalidArgument);
}

TEST(RunExtraction, RejectsBadInputs) {
  const auto sc = scenario(2, 3, 1);
  ExtractionConfig c;
  c.num_sources = 3;
  EXPECT_THROW(run_extraction(sc.mixture, c), InvalidArgument);
  c.num_sources = 2;
  c.variant = Variant::kSemiIve;
  EXPECT_THROW(run_extraction(sc.mixture, c), InvalidArgument);
  const auto other = scenario(1, 4, 2);
  EXPECT_THROW(run_extraction(sc.mixture, c, &other.steering), DimensionMismatch);
}

SpectralScenario separated(int noises, int frames) {
  SpectralScenarioConfig cfg;
  cfg.sources = 1;
  cfg.mics = 2;
  cfg.noises = noises;
  cfg.num_freqs = 16;
  cfg.num_frames = frames;
  cfg.identity_mixing = true;
  cfg.seed = 3;
  return make_spectral_scenario(cfg);
}

TEST(RunExtraction, AlreadySeparatedMixtureIsRecoveredInOneIteration) {
  const auto sc = separated(0, 200);
  for (Variant v : {Variant::kIveIp1, Variant::kIveIp2New}) {
    ExtractionConfig c;
    c.variant = v;
    c.iterations = 1;
    const auto res = run_extraction(sc.mixture, c);
    ASSERT_EQ(res.images.size(), 1u);
    EXPECT_GE(compute_sdr(res.images[0], sc.images[0]), 60.0) << to_string(v);
  }
}

// With unit noise on the second channel the sample correlation between
// target and noise limits the estimate; the error shrinks as T grows.
TEST(RunExtraction, SeparatedMixtureWithNoiseImprovesWithLength) {
  const SteeringSet* none = nullptr;
  for (Variant v : {Variant::kIveIp1, Variant::kIveIp2Old, Variant::kIveIp2New}) {
    ExtractionConfig c;
    c.variant = v;
    c.iterations = 1;
    const auto short_sc = separated(1, 200);
    const auto long_sc = separated(1, 4000);
    const double sdr_short =
        compute_sdr(run_extraction(short_sc.mixture, c, none).images[0], short_sc.images[0]);
    const double sdr_long =
        compute_sdr(run_extraction(long_sc.mixture, c, none).images[0], long_sc.images[0]);
    EXPECT_GE(sdr_short, 20.0) << to_string(v);
    EXPECT_GT(sdr_long, sdr_short + 5.0) << to_string(v);
  }
}

TEST(RunExtraction, IvaReturnsAllOutputs) {
  const auto sc = scenario(1, 3, 4);
  ExtractionConfig c;
  c.variant = Variant::kIvaIp1;
  c.iterations = 3;
  const auto res = run_extraction(sc.mixture, c);
  EXPECT_EQ(res.images.size(), 3u);
  // The images of all outputs add up to the mixture.
  Spectrogram total = res.images[0];
  for (std::size_t i = 1; i < res.images.size(); ++i) total += res.images[i];
  EXPECT_LE((total - sc.mixture).energy(), 1e-18 * sc.mixture.energy());
}

TEST(RunExtraction, LoggedObjectiveIsMonotoneWithoutStabilizers) {
  for (Variant v : {Variant::kIvaIp1, Variant::kIveIp1, Variant::kIveIp2Old}) {
    for (int k = 1; k <= 2; ++k) {
      const auto sc = scenario(k, 3, 10 + static_cast<std::uint64_t>(k));
      const auto res = run_extraction(sc.mixture, plain_config(v, k, 25));
      const auto& rec = res.log.records;
      ASSERT_EQ(rec.size(), 25u);
      for (std::size_t t = 1; t < rec.size(); ++t) {
        EXPECT_LE(rec[t].nll - rec[t - 1].nll, 1e-8 * std::abs(rec[t - 1].nll))
            << to_string(v) << " K=" << k << " it=" << t;
      }
    }
  }
}

// Every inner step lowers the per-bin surrogate with the noise block profiled
// out (the surrogate does not depend on the scale of W_z's basis otherwise).
TEST(RunExtraction, InnerStepsDescendTheProfiledSurrogate) {
  for (Variant v : {Variant::kIvaIp1, Variant::kIveIp1, Variant::kIveIp2Old}) {
    const int k = 2;
    const auto sc = scenario(k, 4, 20);
    std::map<std::pair<int, int>, double> last;
    int violations = 0, steps = 0;
    ExtractionHooks hooks;
    hooks.on_inner_step = [&](const InnerStep& s) {
      Matrix w = s.w;
      if (v != Variant::kIvaIp1) w.rightCols(w.cols() - k) = complete_noise_block(w, s.noise_covariance, k);
      const double g = bin_surrogate(w, s.source_covariances, s.noise_covariance);
      const auto key = std::make_pair(s.iteration, s.frequency);
      auto it = last.find(key);
      if (it != last.end()) {
        ++steps;
        if (g > it->second + 1e-9 * std::abs(it->second)) ++violations;
      }
      last[key] = g;
    };
    run_extraction(sc.mixture, plain_config(v, k, 5), nullptr, hooks);
    EXPECT_GT(steps, 0);
    EXPECT_EQ(violations, 0) << to_string(v);
  }
}

TEST(RunExtraction, NormalizationAndOrthogonalityAfterEveryStep) {
  const int k = 2;
  const auto sc = scenario(k, 4, 30);
  double worst_norm = 0.0, worst_oc = 0.0;
  ExtractionHooks hooks;
  hooks.on_inner_step = [&](const InnerStep& s) {
    if (s.kind == InnerStep::Kind::kSource) {
      const Vector w = s.w.col(s.index);
      worst_norm = std::max(
          worst_norm, std::abs(w.dot(s.source_covariances[s.index] * w).real() - 1.0));
    } else {
      worst_oc = std::max(worst_oc, (s.w.leftCols(k).adjoint() * s.noise_covariance *
                                     s.w.rightCols(s.w.cols() - k))
                                        .norm());
    }
  };
  for (Variant v : {Variant::kIveIp1, Variant::kIveIp2Old, Variant::kIveIp2New}) {
    ExtractionConfig c;
    c.variant = v;
    c.num_sources = k;
    c.iterations = 5;
    run_extraction(sc.mixture, c, nullptr, hooks);
  }
  EXPECT_LE(worst_norm, 1e-10);
  EXPECT_LE(worst_oc, 1e-8);
}

TEST(RunExtraction, ExactEigensolverMakesOldAndNewIdentical) {
  for (int k = 1; k <= 3; ++k) {
    const auto sc = scenario(k, k + 2, 40 + static_cast<std::uint64_t>(k));
    std::vector<DemixingSystem> traj[2];
    for (int n = 0; n < 2; ++n) {
      ExtractionConfig c;
      c.variant = n == 0 ? Variant::kIveIp2Old : Variant::kIveIp2New;
      c.num_sources = k;
      c.iterations = 10;
      c.exact_eigensolver = true;
      c.record_objective = false;
      ExtractionHooks hooks;
      hooks.on_iteration = [&](int, const DemixingSystem& w) { traj[n].push_back(w); };
      run_extraction(sc.mixture, c, nullptr, hooks);
    }
    ASSERT_EQ(traj[0].size(), 10u);
    ASSERT_EQ(traj[1].size(), 10u);
    double worst = 0.0;
    for (std::size_t it = 0; it < 10; ++it) {
      for (int f = 0; f < traj[0][it].num_freqs(); ++f) {
        const Matrix a = source_block(traj[0][it], f), b = source_block(traj[1][it], f);
        for (int i = 0; i < k; ++i) {
          worst = std::max(worst, (a.col(i) - b.col(i)).norm() / a.col(i).norm());
        }
      }
    }
    EXPECT_LE(worst, 1e-6) << "K=" << k;
  }
}

TEST(RunExtraction, ConvergesToStationaryPointWithoutLoading) {
  const auto sc = scenario(2, 4, 50);
  for (Variant v : {Variant::kIveIp1, Variant::kIveIp2Old, Variant::kIveIp2New}) {
    ExtractionConfig c;
    c.variant = v;
    c.num_sources = 2;
    c.iterations = 100;
    c.trace_loading = 0.0;
    c.exact_eigensolver = true;
    const auto res = run_extraction(sc.mixture, c);
    EXPECT_LE(res.log.records.back().stationarity, 1e-6) << to_string(v);
  }
}

TEST(RunExtraction, SemiblindConstraintsPersist) {
  const int k = 3, m = 5, l = 2;
  const auto sc = scenario(k, m, 60);
  const SteeringSet steering = sc.steering.leading(l);
  double worst = 0.0;
  ExtractionHooks hooks;
  hooks.on_iteration = [&](int, const DemixingSystem& w) {
    for (int f = 0; f < w.num_freqs(); ++f) {
      const Matrix c = w[f].leftCols(k).adjoint() * steering.a[f];
      Matrix expect = Matrix::Zero(k, l);
      expect.topRows(l).setIdentity();
      worst = std::max(worst, (c - expect).cwiseAbs().maxCoeff());
    }
  };
  ExtractionConfig c;
  c.variant = Variant::kSemiIve;
  c.num_sources = k;
  c.iterations = 10;
  const auto res = run_extraction(sc.mixture, c, &steering, hooks);
  EXPECT_LE(worst, 1e-9);
  EXPECT_EQ(res.images.size(), static_cast<std::size_t>(k));
}

TEST(RunExtraction, DeterministicAndThreadIndependent) {
  const auto sc = scenario(2, 4, 70);
  ExtractionConfig c;
  c.num_sources = 2;
  c.iterations = 8;
  const auto a = run_extraction(sc.mixture, c);
  const auto b = run_extraction(sc.mixture, c);
  c.threads = 3;
  const auto t = run_extraction(sc.mixture, c);
  for (int f = 0; f < sc.mixture.num_freqs(); ++f) {
    EXPECT_EQ(a.demixing[f], b.demixing[f]);
    EXPECT_EQ(a.demixing[f], t.demixing[f]);
  }
  for (std::size_t i = 0; i < a.log.records.size(); ++i) {
    EXPECT_EQ(a.log.records[i].nll, b.log.records[i].nll);
    EXPECT_EQ(a.log.records[i].nll, t.log.records[i].nll);
  }
}

TEST(RunExtraction, EarlyStoppingAndLogSwitches) {
  const auto sc = scenario(1, 3, 80);
  ExtractionConfig c;
  c.iterations = 200;
  c.stop_tol = 1e-3;
  c.stop_window = 2;
  const auto res = run_extraction(sc.mixture, c);
  EXPECT_TRUE(res.log.stopped_early);
  EXPECT_LT(res.log.records.size(), 200u);

  c.stop_tol = 0.0;
  c.iterations = 4;
  c.record_objective = false;
  EXPECT_TRUE(run_extraction(sc.mixture, c).log.records.empty());
}

TEST(RunExtraction, AllZeroMixtureIsRejected) {
  const Spectrogram zero(4, 10, 3);
  EXPECT_THROW(run_extraction(zero, ExtractionConfig{}), AllFramesZero);
}

}  // namespace
}  // namespace ive
