// Copyright 2026 The akf Authors
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

#ifndef AKF_ERROR_HPP_
#define AKF_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace akf {

/// Broad failure category. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kDimension,
  kValue,
  kNumeric,
  kInsufficientData,
  kParse,
  kValidation,
  kIo,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message) : Error(ErrorKind::kDimension, message) {}
};

class ValueError : public Error {
 public:
  explicit ValueError(const std::string& message) : Error(ErrorKind::kValue, message) {}
};

/// Raised when a factorization or iteration fails (non-PD innovation
/// covariance, Cholesky failure, divergence).
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message) : Error(ErrorKind::kNumeric, message) {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& message)
      : Error(ErrorKind::kInsufficientData, message) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(ErrorKind::kParse, "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message) : Error(ErrorKind::kValidation, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::kIo, message) {}
};

/// Writes a one-line warning to stderr. Used for degenerate-but-legal inputs.
void warn(std::string_view message);

}  // namespace akf

#endif  // AKF_ERROR_HPP_
