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

#include "ive/extraction.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "ive/errors.hpp"
#include "ive/parallel.hpp"

namespace ive {
namespace {

using Clock = std::chrono::steady_clock;

constexpr std::array<std::pair<Variant, std::string_view>, 5> kVariantNames{{
    {Variant::kIvaIp1, "iva-ip1"},
    {Variant::kIveIp1, "ive-ip1"},
    {Variant::kIveIp2Old, "ive-ip2-old"},
    {Variant::kIveIp2New, "ive-ip2-new"},
    {Variant::kSemiIve, "semi-ive"},
}};

std::size_t idx(int k) { return static_cast<std::size_t>(k); }

// scale * Y Y^H from the real and imaginary parts stacked, which runs on the
// real GEMM kernels.
Matrix gram(const RealMatrix& re, const RealMatrix& im, double scale) {
  const Eigen::Index m = re.rows();
  RealMatrix z(2 * m, re.cols());
  z.topRows(m) = re;
  z.bottomRows(m) = im;
  RealMatrix g = RealMatrix::Zero(2 * m, 2 * m);
  g.selfadjointView<Eigen::Lower>().rankUpdate(z, scale);
  const RealMatrix full = g.selfadjointView<Eigen::Lower>();
  Matrix v(m, m);
  v.real() = full.topLeftCorner(m, m) + full.bottomRightCorner(m, m);
  v.imag() = full.bottomLeftCorner(m, m) - full.topRightCorner(m, m);
  return v;
}

// (1/T) X diag(phi) X^H without loading.
Matrix weighted_covariance(const Matrix& bin, const RealVector& phi) {
  const RealVector s = phi.cwiseSqrt();
  return gram(bin.real() * s.asDiagonal(), bin.imag() * s.asDiagonal(),
              1.0 / static_cast<double>(bin.cols()));
}

Matrix plain_covariance(const Matrix& bin) {
  return gram(bin.real(), bin.imag(), 1.0 / static_cast<double>(bin.cols()));
}

Matrix loaded(Matrix v, double trace_loading) {
  load_trace(v, trace_loading);
  return v;
}

// Noise block minimizing tr(W_z^H V W_z) - 2 log |det W| for fixed targets.
// With no targets the block is V^{-1/2} up to sign.
Matrix optimal_noise_block(const Matrix& w, const Matrix& v, int num_sources) {
  if (num_sources == 0) return -linalg::inv_sqrt(v);
  return complete_noise_block(w, v, num_sources);
}

class Extractor {
 public:
  Extractor(const Spectrogram& x, const ExtractionConfig& cfg, const SteeringSet* steering,
            const ExtractionHooks& hooks)
      : x_(x),
        cfg_(cfg),
        hooks_(hooks),
        opts_(cfg.eigen_options()),
        num_freqs_(x.num_freqs()),
        num_channels_(x.num_channels()),
        num_sources_(cfg.num_sources) {
    cfg_.validate();
    if (num_freqs_ < 1 || x.num_frames() < 1) throw InvalidArgument("empty spectrogram");
    if (num_sources_ >= num_channels_) throw InvalidArgument("K < M required");
    weighted_ = (cfg_.variant == Variant::kIvaIp1 && !cfg_.iva_gaussian_noise) ? num_channels_
                                                                                 : num_sources_;
    if (cfg_.variant == Variant::kSemiIve) {
      if (steering == nullptr || steering->known() < 1) {
        throw InvalidArgument("semi-ive needs steering vectors for at least one source");
      }
      if (steering->known() > num_sources_) {
        throw InvalidArgument("semi-ive: more steering vectors than sources");
      }
      if (steering->num_freqs() != num_freqs_ ||
          steering->a.front().rows() != num_channels_) {
        throw DimensionMismatch("semi-ive: steering shape does not match the mixture");
      }
      known_ = steering->known();
      a1_ = &steering->a;
    }
    model_ = GgdModel(cfg_.beta, std::vector<double>(idx(weighted_), 1.0), num_freqs_);
  }

  ExtractionResult run() {
    const auto start = Clock::now();
    initialize();
    double elapsed = seconds_since(start);

    ExtractionResult result;
    std::optional<double> previous_nll;
    int quiet = 0;
    for (int it = 1; it <= cfg_.iterations; ++it) {
      const auto t0 = Clock::now();
      iterate(it);
      elapsed += seconds_since(t0);

      const bool want_nll = cfg_.record_objective || cfg_.stop_tol > 0.0;
      if (hooks_.on_iteration) hooks_.on_iteration(it, projection_system());
      if (!want_nll) continue;

      TrajectoryRecord rec;
      rec.iteration = it;
      rec.wall_seconds = elapsed;
      rec.nll = current_nll();
      if (cfg_.record_objective) {
        rec.surrogate = surrogate_value(profile_system(true), cov_);
        if (cfg_.record_stationarity) rec.stationarity = stationarity();
        result.log.records.push_back(rec);
      }
      if (cfg_.stop_tol > 0.0) {
        if (previous_nll) {
          const double drop = (*previous_nll - rec.nll) / std::max(std::abs(*previous_nll), 1e-300);
          quiet = drop < cfg_.stop_tol ? quiet + 1 : 0;
        }
        previous_nll = rec.nll;
        if (quiet >= cfg_.stop_window) {
          result.log.stopped_early = true;
          break;
        }
      }
    }

    finalize();
    result.demixing = w_;
    result.images =
        projection_back(x_, w_, cfg_.variant == Variant::kIvaIp1 ? num_channels_ : num_sources_);
    result.alphas = model_.alphas;
    for (int f = 0; f < num_freqs_; ++f) {
      if (cfg_.variant == Variant::kSemiIve && basis_[idx(f)].permuted) {
        result.permuted_bins.push_back(f);
      }
    }
    return result;
  }

 private:
  static double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  }

  int noise_dim() const { return num_channels_ - num_sources_; }
  int unknown() const { return num_sources_ - known_; }
  bool semi() const { return cfg_.variant == Variant::kSemiIve; }

  // Runs fn on every bin, attaching the bin index to numerical failures.
  template <class Fn>
  void for_each_bin(Fn&& fn) const {
    parallel_for(num_freqs_, cfg_.threads, [&](int f) {
      try {
        fn(f);
      } catch (const SingularMatrix& e) {
        if (e.frequency()) throw;
        throw SingularMatrix(e.what(), f);
      } catch (const NotPositiveDefinite& e) {
        throw SingularMatrix(e.what(), f);
      }
    });
  }

  void initialize() {
    vz_raw_.resize(idx(num_freqs_));
    double energy = 0.0;
    for (int f = 0; f < num_freqs_; ++f) {
      vz_raw_[idx(f)] = plain_covariance(x_.bins[idx(f)]);
      energy += vz_raw_[idx(f)].trace().real();
    }
    if (!(energy > 0.0)) throw AllFramesZero("mixture is zero in every frame");
    cov_.noise.resize(idx(num_freqs_));
    cov_.source.assign(idx(num_freqs_), std::vector<Matrix>(idx(weighted_)));
    if (semi()) raw_.assign(idx(num_freqs_), std::vector<Matrix>(idx(weighted_)));
    for (int f = 0; f < num_freqs_; ++f) cov_.noise[idx(f)] = loaded(vz_raw_[idx(f)], cfg_.trace_loading);

    w_ = DemixingSystem(num_freqs_, num_channels_, num_sources_);
    switch (cfg_.variant) {
      case Variant::kIvaIp1:
        break;
      case Variant::kIveIp1:
      case Variant::kIveIp2Old:
      case Variant::kIveIp2New:
        for_each_bin([&](int f) {
          w_.noise_block(f) = oc_noise_update(w_[f], cov_.noise[idx(f)], num_sources_);
        });
        break;
      case Variant::kSemiIve:
        init_semi();
        break;
    }
  }

  void init_semi() {
    const int reduced = num_channels_ - known_;
    basis_.resize(idx(num_freqs_));
    wbar_.assign(idx(num_freqs_), -Matrix::Identity(reduced, reduced));
    vbarz_.resize(idx(num_freqs_));
    vbarz_raw_.resize(idx(num_freqs_));
    for_each_bin([&](int f) {
      const std::size_t k = idx(f);
      basis_[k] = semi_basis((*a1_)[k]);
      vbarz_raw_[k] = reduce_covariance(basis_[k].basis, vz_raw_[k], 0.0);
      vbarz_[k] = loaded(vbarz_raw_[k], cfg_.trace_loading);
      Matrix& wbar = wbar_[k];
      wbar.rightCols(reduced - unknown()) = semi_noise_completion(wbar, vbarz_[k], unknown());
      for (int j = 0; j < unknown(); ++j) w_[f].col(known_ + j) = basis_[k].basis * wbar.col(j);
      w_.noise_block(f) = basis_[k].basis * wbar.rightCols(reduced - unknown());
    });
  }

  // Weights and weighted covariances at the given demixing system.
  void refresh_covariances(const DemixingSystem& w, GgdModel& model, CovarianceSet& cov,
                           std::vector<std::vector<Matrix>>* raw) const {
    const RealMatrix r = floor_norms(aux_norms(source_signals(x_, w, weighted_)));
    model.alphas = update_scales(model, r);
    const RealMatrix phi = contrast_weights(model, r, cfg_.phi_clip);
    for_each_bin([&](int f) {
      const Matrix& bin = x_.bins[idx(f)];
      auto& vs = cov.source[idx(f)];
      for (int i = 0; i < weighted_; ++i) {
        Matrix v = weighted_covariance(bin, phi.row(i).transpose());
        if (raw != nullptr) (*raw)[idx(f)][idx(i)] = v;
        load_trace(v, cfg_.trace_loading);
        vs[idx(i)] = std::move(v);
      }
    });
  }

  void iterate(int iteration) {
    refresh_covariances(w_, model_, cov_, semi() ? &raw_ : nullptr);
    for_each_bin([&](int f) { update_bin(iteration, f); });
  }

  void update_bin(int iteration, int f) {
    Matrix& w = w_[f];
    const auto& vs = cov_.source[idx(f)];
    const Matrix& vz = cov_.noise[idx(f)];
    const int noise = noise_dim();
    auto notify = [&](InnerStep::Kind kind, int index) {
      if (hooks_.on_inner_step) hooks_.on_inner_step(InnerStep{iteration, f, index, kind, w, vs, vz});
    };

    switch (cfg_.variant) {
      case Variant::kIvaIp1:
        for (int i = 0; i < num_channels_; ++i) {
          w.col(i) = ip1_source_update(w, i < weighted_ ? vs[idx(i)] : vz, i);
          notify(InnerStep::Kind::kSource, i);
        }
        break;
      case Variant::kIveIp1:
        for (int i = 0; i < num_sources_; ++i) {
          w.col(i) = ip1_source_update(w, vs[idx(i)], i);
          notify(InnerStep::Kind::kSource, i);
          w.rightCols(noise) = oc_noise_update(w, vz, num_sources_);
          notify(InnerStep::Kind::kNoise, -1);
        }
        break;
      case Variant::kIveIp2Old:
        for (int i = 0; i < num_sources_; ++i) {
          SourceUpdate up = num_sources_ == 1
                                ? ip2_k1_update(vs[0], vz, opts_, nullptr, true)
                                : ip2_pair_update(w, vs[idx(i)], vz, i, num_sources_, true, opts_);
          w.col(i) = up.w;
          w.rightCols(noise) = *up.noise_block;
          notify(InnerStep::Kind::kSource, i);
        }
        break;
      case Variant::kIveIp2New:
        for (int i = 0; i < num_sources_; ++i) {
          SourceUpdate up;
          if (num_sources_ == 1) {
            const Vector warm = w.col(0);
            up = ip2_k1_update(vs[0], vz, opts_, &warm);
          } else {
            up = ip2_pair_update(w, vs[idx(i)], vz, i, num_sources_, false, opts_);
          }
          w.col(i) = up.w;
          notify(InnerStep::Kind::kSource, i);
        }
        break;
      case Variant::kSemiIve: {
        const Matrix& a1 = (*a1_)[idx(f)];
        for (int i = 0; i < known_; ++i) {
          w.col(i) = lcmv_update(vs[idx(i)], a1, i);
          notify(InnerStep::Kind::kSource, i);
        }
        const Matrix& basis = basis_[idx(f)].basis;
        Matrix& wbar = wbar_[idx(f)];
        for (int j = 0; j < unknown(); ++j) {
          const Matrix vbar =
              reduce_covariance(basis, raw_[idx(f)][idx(known_ + j)], cfg_.trace_loading);
          const SourceUpdate up = semi_ive_update(wbar, vbar, vbarz_[idx(f)], j, unknown(), opts_);
          wbar.col(j) = up.w;
          w.col(known_ + j) = basis * up.w;
          notify(InnerStep::Kind::kSource, known_ + j);
        }
        break;
      }
    }
  }

  // g0 at the current iterate, with the scales set to their optimum for it
  // (the values the next iteration will use). On a rank-deficient mixture the raw profile does not exist and the
  // loaded completion is used instead; -inf when neither exists.
  double current_nll() const {
    DemixingSystem w;
    try {
      w = profile_system(false);
    } catch (const Error&) {
      try {
        w = profile_system(true);
      } catch (const Error&) {
        return -std::numeric_limits<double>::infinity();
      }
    }
    GgdModel model = model_;
    model.alphas = update_scales(model, floor_norms(aux_norms(source_signals(x_, w, weighted_))));
    return nll_value(x_, w, model);
  }

  // Noise block used for projection back (OC, unnormalized).
  DemixingSystem projection_system() const {
    DemixingSystem out = w_;
    if (cfg_.variant == Variant::kIveIp2New) {
      for (int f = 0; f < num_freqs_; ++f) {
        out.noise_block(f) = oc_noise_update(w_[f], cov_.noise[idx(f)], num_sources_);
      }
    } else if (semi()) {
      for (int f = 0; f < num_freqs_; ++f) {
        const Matrix wz = semi_noise_completion(wbar_[idx(f)], vbarz_[idx(f)], unknown());
        out.noise_block(f) = basis_[idx(f)].basis * wz.rightCols(noise_dim());
      }
    }
    return out;
  }

  // Noise block replaced by its optimal completion against the loaded
  // (`loaded_cov`) or raw mixture covariance.
  DemixingSystem profile_system(bool loaded_cov) const {
    if (cfg_.variant == Variant::kIvaIp1) return w_;
    DemixingSystem out = w_;
    for (int f = 0; f < num_freqs_; ++f) {
      if (semi()) {
        const Matrix& vbz = loaded_cov ? vbarz_[idx(f)] : vbarz_raw_[idx(f)];
        const Matrix wz = optimal_noise_block(wbar_[idx(f)], vbz, unknown());
        out.noise_block(f) = basis_[idx(f)].basis * wz.rightCols(noise_dim());
      } else {
        const Matrix& vz = loaded_cov ? cov_.noise[idx(f)] : vz_raw_[idx(f)];
        out.noise_block(f) = complete_noise_block(w_[f], vz, num_sources_);
      }
    }
    return out;
  }

  // Largest first-order residual of the surrogate problem solved in this
  // iteration, at the updated (noise-completed) demixing system.
  double stationarity() const {
    const DemixingSystem w = profile_system(true);
    std::vector<double> per_bin(idx(num_freqs_), 0.0);
    for_each_bin([&](int f) {
      const auto& vs = cov_.source[idx(f)];
      if (!semi()) {
        per_bin[idx(f)] = stationarity_residual(w[f], vs, cov_.noise[idx(f)]);
        return;
      }
      double worst = 0.0;
      const Matrix& a1 = (*a1_)[idx(f)];
      for (int i = 0; i < known_; ++i) {
        const Vector target = lcmv_update(vs[idx(i)], a1, i);
        worst = std::max(worst, (w[f].col(i) - target).norm() / target.norm());
      }
      const Matrix& basis = basis_[idx(f)].basis;
      Matrix wbar = wbar_[idx(f)];
      const int reduced = static_cast<int>(wbar.cols());
      wbar.rightCols(reduced - unknown()) =
          optimal_noise_block(wbar, vbarz_[idx(f)], unknown()).rightCols(reduced - unknown());
      std::vector<Matrix> vbar;
      for (int j = 0; j < unknown(); ++j) {
        vbar.push_back(reduce_covariance(basis, raw_[idx(f)][idx(known_ + j)], cfg_.trace_loading));
      }
      worst = std::max(worst, stationarity_residual(wbar, vbar, vbarz_[idx(f)]));
      per_bin[idx(f)] = worst;
    });
    return *std::max_element(per_bin.begin(), per_bin.end());
  }

  void finalize() {
    if (cfg_.variant == Variant::kIveIp2New || semi()) w_ = projection_system();
  }

  const Spectrogram& x_;
  ExtractionConfig cfg_;
  const ExtractionHooks& hooks_;
  EigenOptions opts_;
  int num_freqs_;
  int num_channels_;
  int num_sources_;
  int weighted_ = 0;
  int known_ = 0;
  const std::vector<Matrix>* a1_ = nullptr;

  GgdModel model_;
  DemixingSystem w_;
  CovarianceSet cov_;
  std::vector<Matrix> vz_raw_;
  std::vector<std::vector<Matrix>> raw_;

  std::vector<ReducedBasis> basis_;
  std::vector<Matrix> wbar_;
  std::vector<Matrix> vbarz_;
  std::vector<Matrix> vbarz_raw_;
};

}  // namespace

std::string_view to_string(Variant v) {
  for (const auto& [variant, name] : kVariantNames) {
    if (variant == v) return name;
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (const auto& [variant, n] : kVariantNames) {
    if (n == name) return variant;
  }
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

void ExtractionConfig::validate() const {
  if (num_sources < 1) throw InvalidArgument("num_sources must be >= 1");
  if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (power_iters < 1) throw InvalidArgument("power_iters must be >= 1");
  if (!(power_tol >= 0.0)) throw InvalidArgument("power_tol must be >= 0");
  if (!(trace_loading >= 0.0)) throw InvalidArgument("trace_loading must be >= 0");
  if (!(phi_clip > 1.0)) throw InvalidArgument("phi_clip must be > 1");
  if (!(beta > 0.0 && beta <= 2.0)) throw InvalidArgument("beta must lie in (0, 2]");
  if (!(stop_tol >= 0.0)) throw InvalidArgument("stop_tol must be >= 0");
  if (stop_window < 1) throw InvalidArgument("stop_window must be >= 1");
  if (threads < 1) throw InvalidArgument("threads must be >= 1");
}

EigenOptions ExtractionConfig::eigen_options() const {
  EigenOptions o;
  o.power_iters = power_iters;
  o.power_tol = power_tol;
  o.exact = exact_eigensolver;
  return o;
}

Matrix mixture_covariance(const Matrix& bin, double trace_loading) {
  if (bin.cols() == 0) throw InvalidArgument("mixture_covariance: no frames");
  return loaded(plain_covariance(bin), trace_loading);
}

CovarianceSet weighted_covariances(const Spectrogram& x, const RealMatrix& phi,
                                   double trace_loading, int threads) {
  if (phi.cols() != x.num_frames()) {
    throw DimensionMismatch("weighted_covariances: one weight per frame required");
  }
  if (x.num_frames() == 0) throw InvalidArgument("weighted_covariances: no frames");
  if (!(x.energy() > 0.0)) throw AllFramesZero("mixture is zero in every frame");
  CovarianceSet out;
  const int num_freqs = x.num_freqs();
  out.noise.resize(idx(num_freqs));
  out.source.assign(idx(num_freqs), std::vector<Matrix>(idx(static_cast<int>(phi.rows()))));
  parallel_for(num_freqs, threads, [&](int f) {
    const Matrix& bin = x.bins[idx(f)];
    out.noise[idx(f)] = loaded(plain_covariance(bin), trace_loading);
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
      out.source[idx(f)][static_cast<std::size_t>(i)] =
          loaded(weighted_covariance(bin, phi.row(i).transpose()), trace_loading);
    }
  });
  return out;
}

std::vector<Spectrogram> projection_back(const Spectrogram& x, const DemixingSystem& w,
                                         int count) {
  if (count < 0) count = w.num_sources();
  if (x.num_freqs() != w.num_freqs() || x.num_channels() != w.num_channels()) {
    throw DimensionMismatch("projection_back: spectrogram and demixing system disagree");
  }
  if (count > w.num_channels()) throw InvalidArgument("projection_back: too many outputs");
  const int num_freqs = x.num_freqs();
  const int dim = x.num_channels();
  std::vector<Spectrogram> out(idx(count), Spectrogram(num_freqs, x.num_frames(), dim));
  for (int f = 0; f < num_freqs; ++f) {
    Matrix scale;
    try {
      scale = linalg::solve_linear(w[f].adjoint(), selector(dim, 0, count));
    } catch (const SingularMatrix& e) {
      throw SingularMatrix(e.what(), f);
    }
    const Matrix s = w[f].leftCols(count).adjoint() * x.bins[idx(f)];
    for (int i = 0; i < count; ++i) out[idx(i)].bins[idx(f)] = scale.col(i) * s.row(i);
  }
  return out;
}

ExtractionResult run_extraction(const Spectrogram& x, const ExtractionConfig& config,
                                const SteeringSet* steering, const ExtractionHooks& hooks) {
  return Extractor(x, config, steering, hooks).run();
}

}  // namespace ive
