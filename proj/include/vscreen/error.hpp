/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vscreen {

/// Root of the toolkit's exception hierarchy. The CLI maps each subclass to
/// a fixed process exit code: configuration/argument problems exit 2, bad
/// input data exits 3, everything else exits 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Unknown scorer, malformed config file, missing direction, and the like.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Out-of-domain argument to an operation (fraction <= 0, alpha <= 0, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Unreadable, malformed, or invariant-violating input data.
class DataError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// A cell that could not be parsed; carries the 1-based data row number.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t row)
      : DataError(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// A metric is mathematically undefined for the given input (no actives,
/// single-class labels, ...).
class MetricError : public DataError {
 public:
  using DataError::DataError;
};

/// Input the operation does not support by contract (e.g. BEDROC on a
/// filtered ranking).
class UnsupportedInputError : public DataError {
 public:
  using DataError::DataError;
};

/// Width/shape mismatch between a matrix and the parameters applied to it.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during model training.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace vscreen
