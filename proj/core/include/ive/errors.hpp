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

#ifndef IVE_ERRORS_HPP_
#define IVE_ERRORS_HPP_

#include <optional>
#include <stdexcept>
#include <string>

namespace ive {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cholesky hit a non-positive pivot. Callers are expected to apply trace
// loading and retry.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// A pivoted factorization found a (numerically) zero pivot. When raised from
// inside the extraction loop the offending frequency bin is attached.
class SingularMatrix : public Error {
 public:
  explicit SingularMatrix(const std::string& what,
                          std::optional<int> frequency = std::nullopt)
      : Error(frequency ? what + " (frequency bin " +
                              std::to_string(*frequency) + ")"
                        : what),
        frequency_(frequency) {}

  std::optional<int> frequency() const { return frequency_; }

 private:
  std::optional<int> frequency_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class AllFramesZero : public Error {
 public:
  using Error::Error;
};

class TooShort : public Error {
 public:
  using Error::Error;
};

class ConfigMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroReference : public Error {
 public:
  using Error::Error;
};

class ZeroImage : public Error {
 public:
  ZeroImage(const std::string& what, int frequency)
      : Error(what + " (frequency bin " + std::to_string(frequency) + ")"),
        frequency_(frequency) {}

  int frequency() const { return frequency_; }

 private:
  int frequency_;
};

}  // namespace ive

#endif  // IVE_ERRORS_HPP_
