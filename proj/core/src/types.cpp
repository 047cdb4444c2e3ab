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

#include "ive/types.hpp"

#include "ive/errors.hpp"

namespace ive {

Spectrogram::Spectrogram(int num_freqs, int num_frames, int num_channels)
    : bins(static_cast<std::size_t>(num_freqs), Matrix::Zero(num_channels, num_frames)) {}

double Spectrogram::energy() const {
  double acc = 0.0;
  for (const auto& b : bins) acc += b.squaredNorm();
  return acc;
}

Spectrogram& Spectrogram::operator+=(const Spectrogram& other) {
  if (other.bins.size() != bins.size()) throw DimensionMismatch("spectrogram shapes differ");
  for (std::size_t f = 0; f < bins.size(); ++f) bins[f] += other.bins[f];
  return *this;
}

Spectrogram& Spectrogram::operator-=(const Spectrogram& other) {
  if (other.bins.size() != bins.size()) throw DimensionMismatch("spectrogram shapes differ");
  for (std::size_t f = 0; f < bins.size(); ++f) bins[f] -= other.bins[f];
  return *this;
}

Spectrogram& Spectrogram::operator*=(double scale) {
  for (auto& b : bins) b *= scale;
  return *this;
}

Spectrogram operator+(Spectrogram a, const Spectrogram& b) { return a += b; }
Spectrogram operator-(Spectrogram a, const Spectrogram& b) { return a -= b; }

DemixingSystem::DemixingSystem(int num_freqs, int num_channels, int num_sources)
    : num_channels_(num_channels),
      num_sources_(num_sources),
      w_(static_cast<std::size_t>(num_freqs), -Matrix::Identity(num_channels, num_channels)) {
  if (num_sources < 1 || num_sources > num_channels) {
    throw InvalidArgument("demixing system needs 1 <= K <= M");
  }
}

SteeringSet SteeringSet::leading(int count) const {
  if (count < 0 || count > known()) throw InvalidArgument("steering: not enough known sources");
  SteeringSet out;
  out.a.reserve(a.size());
  for (const auto& m : a) out.a.push_back(m.leftCols(count));
  return out;
}

Matrix selector(int dim, int first, int count) {
  Matrix e = Matrix::Zero(dim, count);
  for (int k = 0; k < count; ++k) e(first + k, k) = 1.0;
  return e;
}

}  // namespace ive
