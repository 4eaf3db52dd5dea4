// Copyright 2026 The lneflow Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace lneflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (shape, sign, dimension...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// I - u u^T is too close to singular for exact inversion.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// A pointwise metric on a grid has smallest eigenvalue below threshold.
class DegenerateMetric : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite gradient or loss.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared while integrating a flow.
class SingularityDetected : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ContractViolation(what);
}

}  // namespace lneflow
