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

// Shared fixtures for the unit tests: seeded random matrices and scratch
// directories.

#ifndef IVE_TESTS_UNIT_TEST_UTIL_HPP_
#define IVE_TESTS_UNIT_TEST_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "ive/linalg.hpp"
#include "ive/types.hpp"

namespace ive::test {

inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  return a;
}

inline Vector random_vector(int n, std::mt19937_64& rng) { return random_matrix(n, 1, rng); }

/// M^H M + I.
inline Matrix random_hpd(int n, std::mt19937_64& rng) {
  const Matrix m = random_matrix(n, n, rng);
  return m.adjoint() * m + Matrix::Identity(n, n);
}

inline Spectrogram random_spectrogram(int freqs, int frames, int channels, std::mt19937_64& rng) {
  Spectrogram x(freqs, frames, channels);
  for (auto& b : x.bins) b = random_matrix(channels, frames, rng);
  return x;
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ive_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& child = "") const {
    return child.empty() ? path_.string() : (path_ / child).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace ive::test

#endif  // IVE_TESTS_UNIT_TEST_UTIL_HPP_
