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

#include "ive/updates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ive/errors.hpp"

namespace ive {
namespace {

using linalg::hermitian_part;
using linalg::solve_linear;

// [e_i, E_z] for a K-source system of dimension M.
Matrix pair_selector(int dim, int i, int num_sources) {
  const int noise = dim - num_sources;
  Matrix sel = Matrix::Zero(dim, noise + 1);
  sel(i, 0) = 1.0;
  for (int k = 0; k < noise; ++k) sel(num_sources + k, k + 1) = 1.0;
  return sel;
}

double quadratic(const Vector& x, const Matrix& v) { return x.dot(v * x).real(); }

linalg::GeneralizedEigenpair top_pair(const Matrix& a, const Matrix& b, const EigenOptions& opts,
                                      const Vector* warm) {
  if (opts.exact) return linalg::gevd_full(a, b).front();
  if (warm != nullptr && warm->size() == a.rows() && warm->norm() > 0.0) {
    return linalg::gevd_top(a, b, *warm, opts.power_iters, opts.power_tol);
  }
  return linalg::gevd_top(a, b, opts.power_iters, opts.power_tol);
}

}  // namespace

void load_trace(Matrix& v, double trace_loading) {
  if (trace_loading <= 0.0) return;
  const double tr = v.trace().real();
  v.diagonal().array() += trace_loading * tr;
}

Vector ip1_source_update(const Matrix& w, const Matrix& v, int i) {
  const int dim = static_cast<int>(w.rows());
  const Vector u = solve_linear(w.adjoint() * v, selector(dim, i, 1));
  return u / std::sqrt(quadratic(u, v));
}

Matrix oc_noise_update(const Matrix& w, const Matrix& vz, int num_sources) {
  const int dim = static_cast<int>(w.rows());
  const int noise = dim - num_sources;
  const Matrix ws_vz = w.leftCols(num_sources).adjoint() * vz;
  Matrix wz(dim, noise);
  wz.topRows(num_sources) =
      solve_linear(ws_vz.leftCols(num_sources), ws_vz.rightCols(noise));
  wz.bottomRows(noise) = -Matrix::Identity(noise, noise);
  return wz;
}

Matrix complete_noise_block(const Matrix& w, const Matrix& vz, int num_sources) {
  const Matrix wz = oc_noise_update(w, vz, num_sources);
  return wz * linalg::inv_sqrt(wz.adjoint() * vz * wz);
}

SourceUpdate ip2_k1_update(const Matrix& v1, const Matrix& vz, const EigenOptions& opts,
                           const Vector* warm, bool with_noise_block) {
  SourceUpdate out;
  if (with_noise_block) {
    const auto pairs = linalg::gevd_full(vz, v1);
    const Vector& u = pairs.front().vector;
    out.lambda = pairs.front().value;
    out.w = u / std::sqrt(quadratic(u, v1));
    const int dim = static_cast<int>(v1.rows());
    Matrix uz(dim, dim - 1);
    for (int k = 1; k < dim; ++k) uz.col(k - 1) = pairs[static_cast<std::size_t>(k)].vector;
    out.noise_block = uz * linalg::inv_sqrt(uz.adjoint() * vz * uz);
    return out;
  }
  const auto pair = top_pair(vz, v1, opts, warm);
  out.lambda = pair.value;
  out.w = pair.vector / std::sqrt(quadratic(pair.vector, v1));
  return out;
}

SourceUpdate ip2_pair_update(const Matrix& w, const Matrix& vi, const Matrix& vz, int i,
                             int num_sources, bool with_noise_block, const EigenOptions& opts,
                             bool warm_start) {
  const int dim = static_cast<int>(w.rows());
  if (num_sources < 2 || num_sources >= dim) {
    throw InvalidArgument("ip2_pair_update: requires 2 <= K < M");
  }
  const Matrix sel = pair_selector(dim, i, num_sources);
  const Matrix wh = w.adjoint();
  const Matrix pi = solve_linear(wh * vi, sel);
  const Matrix pz = solve_linear(wh * vz, sel);
  const Matrix gi = hermitian_part(pi.adjoint() * vi * pi);
  const Matrix gz = hermitian_part(pz.adjoint() * vz * pz);

  SourceUpdate out;
  Vector b;
  if (with_noise_block) {
    const auto pairs = linalg::gevd_full(gi, gz);
    b = pairs.front().vector;
    out.lambda = pairs.front().value;
    const int n = static_cast<int>(pairs.size());
    Matrix bz(n, n - 1);
    for (int k = 1; k < n; ++k) bz.col(k - 1) = pairs[static_cast<std::size_t>(k)].vector;
    out.noise_block = pz * bz * linalg::inv_sqrt(bz.adjoint() * gz * bz);
  } else {
    Vector warm;
    if (warm_start && !opts.exact) warm = sel.adjoint() * (wh * (vi * w.col(i)));
    const auto pair = top_pair(gi, gz, opts, warm.size() > 0 ? &warm : nullptr);
    b = pair.vector;
    out.lambda = pair.value;
  }
  out.w = pi * b / std::sqrt(quadratic(b, gi));
  linalg::normalize_phase(out.w);
  return out;
}

Vector lcmv_update(const Matrix& vi, const Matrix& a1, int i) {
  const int known = static_cast<int>(a1.cols());
  if (i < 0 || i >= known) throw InvalidArgument("lcmv_update: index outside the known set");
  const Matrix x = solve_linear(vi, a1);
  const Matrix gram = a1.adjoint() * x;
  return x * solve_linear(gram, selector(known, i, 1));
}

ReducedBasis semi_basis(const Matrix& a1) {
  const int dim = static_cast<int>(a1.rows());
  const int known = static_cast<int>(a1.cols());
  if (known < 1 || known >= dim) throw InvalidArgument("semi_basis: requires 1 <= L < M");

  ReducedBasis out;
  out.complement.resize(static_cast<std::size_t>(dim - known));
  std::iota(out.complement.begin(), out.complement.end(), known);

  auto build = [&](const std::vector<int>& rows) {
    Matrix full(dim, dim);
    full.leftCols(known) = a1;
    full.rightCols(dim - known).setZero();
    for (int k = 0; k < dim - known; ++k) full(rows[static_cast<std::size_t>(k)], known + k) = 1.0;
    return full;
  };

  Matrix full = build(out.complement);
  if (!(Eigen::PartialPivLU<Matrix>(full).rcond() >= 1e-10)) {
    // Keep the channels A_1 does not pivot on.
    Matrix work = a1;
    std::vector<int> pivots;
    std::vector<bool> used(static_cast<std::size_t>(dim), false);
    for (int c = 0; c < known; ++c) {
      int best = -1;
      double best_abs = 0.0;
      for (int r = 0; r < dim; ++r) {
        if (used[static_cast<std::size_t>(r)]) continue;
        if (std::abs(work(r, c)) > best_abs) {
          best_abs = std::abs(work(r, c));
          best = r;
        }
      }
      if (best < 0 || best_abs == 0.0) throw SingularMatrix("semi_basis: steering vectors are dependent");
      used[static_cast<std::size_t>(best)] = true;
      pivots.push_back(best);
      for (int r = 0; r < dim; ++r) {
        if (used[static_cast<std::size_t>(r)]) continue;
        const Complex factor = work(r, c) / work(best, c);
        work.row(r) -= factor * work.row(best);
      }
    }
    out.complement.clear();
    for (int r = 0; r < dim; ++r) {
      if (!used[static_cast<std::size_t>(r)]) out.complement.push_back(r);
    }
    out.permuted = true;
    full = build(out.complement);
  }
  Matrix block = Matrix::Zero(dim, dim - known);
  block.bottomRows(dim - known).setIdentity();
  out.basis = solve_linear(full.adjoint(), block);
  return out;
}

Matrix reduce_covariance(const Matrix& basis, const Matrix& v, double trace_loading) {
  Matrix out = hermitian_part(basis.adjoint() * v * basis);
  load_trace(out, trace_loading);
  return out;
}

SourceUpdate semi_ive_update(const Matrix& wbar, const Matrix& vbar_j, const Matrix& vbar_z,
                             int j, int num_unknown, const EigenOptions& opts) {
  if (num_unknown < 1) throw InvalidArgument("semi_ive_update: no unknown sources");
  if (num_unknown == 1) {
    const Vector warm = wbar.col(0);
    return ip2_k1_update(vbar_j, vbar_z, opts, &warm);
  }
  return ip2_pair_update(wbar, vbar_j, vbar_z, j, num_unknown, false, opts);
}

Matrix semi_noise_completion(const Matrix& wbar, const Matrix& vbar_z, int num_unknown) {
  const int dim = static_cast<int>(wbar.rows());
  if (num_unknown == 0) return -Matrix::Identity(dim, dim);
  return oc_noise_update(wbar, vbar_z, num_unknown);
}

double stationarity_residual(const Matrix& w, const std::vector<Matrix>& vs, const Matrix& vz) {
  const int dim = static_cast<int>(w.rows());
  const int weighted = static_cast<int>(vs.size());
  const Matrix wh = w.adjoint();
  double worst = 0.0;
  for (int i = 0; i < weighted; ++i) {
    Vector row = wh * (vs[static_cast<std::size_t>(i)] * w.col(i));
    row(i) -= 1.0;
    worst = std::max(worst, row.norm());
  }
  const int noise = dim - weighted;
  if (noise > 0) {
    Matrix block = wh * vz * w.rightCols(noise);
    block.bottomRows(noise) -= Matrix::Identity(noise, noise);
    worst = std::max(worst, block.norm());
  }
  return worst;
}

std::vector<double> stationarity_residual(const DemixingSystem& w, const CovarianceSet& cov) {
  std::vector<double> out(static_cast<std::size_t>(w.num_freqs()));
  for (int f = 0; f < w.num_freqs(); ++f) {
    out[static_cast<std::size_t>(f)] =
        stationarity_residual(w[f], cov.source[static_cast<std::size_t>(f)],
                              cov.noise[static_cast<std::size_t>(f)]);
  }
  return out;
}

}  // namespace ive
