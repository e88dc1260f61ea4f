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

#include "akf/error.hpp"

#include <iostream>

namespace akf {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kValue: return "value";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kInsufficientData: return "insufficient_data";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

void warn(std::string_view message) { std::clog << "akf: warning: " << message << '\n'; }

}  // namespace akf
