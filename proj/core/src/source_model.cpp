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

#include "ive/source_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ive/errors.hpp"

namespace ive {

GgdModel::GgdModel(double beta_in, std::vector<double> alphas_in, int num_freqs_in)
    : beta(beta_in), alphas(std::move(alphas_in)), num_freqs(num_freqs_in) {
  if (!(beta > 0.0 && beta <= 2.0)) throw InvalidArgument("GGD shape must lie in (0, 2]");
  if (num_freqs < 1) throw InvalidArgument("GGD model needs F >= 1");
  for (double a : alphas) {
    if (!(a > 0.0)) throw InvalidArgument("GGD scales must be positive");
  }
}

double GgdModel::contrast(int i, double r) const {
  const double alpha = alphas[static_cast<std::size_t>(i)];
  return std::pow(r / alpha, beta) + 2.0 * num_freqs * std::log(alpha);
}

double GgdModel::contrast_derivative(int i, double r) const {
  const double alpha = alphas[static_cast<std::size_t>(i)];
  return beta / alpha * std::pow(r / alpha, beta - 1.0);
}

std::vector<Matrix> source_signals(const Spectrogram& x, const DemixingSystem& w, int count) {
  if (count < 0) count = w.num_sources();
  if (x.num_freqs() != w.num_freqs() || x.num_channels() != w.num_channels()) {
    throw DimensionMismatch("source_signals: spectrogram and demixing system disagree");
  }
  if (count > w.num_channels()) throw InvalidArgument("source_signals: too many outputs");
  const int num_freqs = x.num_freqs();
  const int num_frames = x.num_frames();
  std::vector<Matrix> out(static_cast<std::size_t>(count), Matrix(num_freqs, num_frames));
  for (int f = 0; f < num_freqs; ++f) {
    const Matrix y = w[f].leftCols(count).adjoint() * x.bins[static_cast<std::size_t>(f)];
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)].row(f) = y.row(i);
  }
  return out;
}

RealMatrix aux_norms(const std::vector<Matrix>& signals) {
  if (signals.empty()) return {};
  RealMatrix r(static_cast<Eigen::Index>(signals.size()), signals[0].cols());
  for (std::size_t i = 0; i < signals.size(); ++i) {
    r.row(static_cast<Eigen::Index>(i)) = signals[i].cwiseAbs2().colwise().sum().cwiseSqrt();
  }
  return r;
}

RealMatrix floor_norms(RealMatrix r) {
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    const double floor = std::max(1e-12 * r.row(i).maxCoeff(), 1e-300);
    r.row(i) = r.row(i).cwiseMax(floor);
  }
  return r;
}

std::vector<double> update_scales(const GgdModel& model, const RealMatrix& r) {
  std::vector<double> alphas(static_cast<std::size_t>(r.rows()));
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    const double mean = r.row(i).array().pow(model.beta).mean();
    const double alpha_pow = model.beta / (2.0 * model.num_freqs) * mean;
    alphas[static_cast<std::size_t>(i)] = std::pow(alpha_pow, 1.0 / model.beta);
  }
  return alphas;
}

RealMatrix raw_contrast_weights(const GgdModel& model, const RealMatrix& r) {
  if (r.rows() != model.num_sources()) {
    throw DimensionMismatch("contrast_weights: one scale per source row required");
  }
  RealMatrix phi(r.rows(), r.cols());
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    const double alpha_pow = std::pow(model.alphas[static_cast<std::size_t>(i)], model.beta);
    phi.row(i) = (0.5 * model.beta / alpha_pow) * r.row(i).array().pow(model.beta - 2.0);
  }
  return phi;
}

RealMatrix contrast_weights(const GgdModel& model, const RealMatrix& r, double phi_clip) {
  RealMatrix phi = raw_contrast_weights(model, r);
  if (std::isfinite(phi_clip)) {
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
      const double ceiling = phi_clip * phi.row(i).minCoeff();
      phi.row(i) = phi.row(i).cwiseMin(ceiling);
    }
  }
  return phi;
}

double surrogate_value(const DemixingSystem& w, const CovarianceSet& covariances) {
  if (covariances.num_freqs() != w.num_freqs()) {
    throw DimensionMismatch("surrogate_value: frequency counts differ");
  }
  double total = 0.0;
  for (int f = 0; f < w.num_freqs(); ++f) {
    const Matrix& wf = w[f];
    const auto& vs = covariances.source[static_cast<std::size_t>(f)];
    const int weighted = static_cast<int>(vs.size());
    for (int i = 0; i < weighted; ++i) {
      total += wf.col(i).dot(vs[static_cast<std::size_t>(i)] * wf.col(i)).real();
    }
    const auto rest = wf.rightCols(wf.cols() - weighted);
    total += (rest.adjoint() * covariances.noise[static_cast<std::size_t>(f)] * rest)
                 .trace()
                 .real();
    total -= 2.0 * linalg::log_abs_det(wf);
  }
  return total;
}

double nll_value(const Spectrogram& x, const DemixingSystem& w, const GgdModel& model) {
  const int sources = model.num_sources();
  const int num_frames = x.num_frames();
  if (num_frames == 0) throw InvalidArgument("nll_value: empty spectrogram");
  if (model.num_freqs != x.num_freqs()) {
    throw DimensionMismatch("nll_value: model frequency count differs from data");
  }
  const RealMatrix r = aux_norms(source_signals(x, w, sources));
  double total = 0.0;
  for (int i = 0; i < sources; ++i) {
    double acc = 0.0;
    for (int t = 0; t < num_frames; ++t) acc += model.contrast(i, r(i, t));
    total += acc / num_frames;
  }
  for (int f = 0; f < x.num_freqs(); ++f) {
    const Matrix& wf = w[f];
    const auto noise = wf.rightCols(wf.cols() - sources);
    if (noise.cols() > 0) {
      total += (noise.adjoint() * x.bins[static_cast<std::size_t>(f)]).squaredNorm() / num_frames;
    }
    total -= 2.0 * linalg::log_abs_det(wf);
  }
  return total;
}

}  // namespace ive
