// Copyright 2026 The ionsim Authors
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

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ionsim::io {

/// Shortest text that round-trips the double exactly ("%.17g").
std::string format_double(double value);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Split one CSV line on commas; no quoting support.
std::vector<std::string> split_csv_line(std::string_view line);

double parse_double(std::string_view token);

/// Dense matrix as CSV without header.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

}  // namespace ionsim::io
