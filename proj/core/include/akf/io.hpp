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

#ifndef AKF_IO_HPP_
#define AKF_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

namespace akf {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over the target, so
/// readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// printf "%.17g": shortest text that always parses back to the same double.
std::string format_double(double v);

}  // namespace akf

#endif  // AKF_IO_HPP_
