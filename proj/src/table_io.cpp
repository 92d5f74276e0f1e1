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

#include "ionsim/table_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ionsim/errors.hpp"

namespace ionsim::io {

std::string format_double(double value) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof(buf), "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(len));
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string_view tok = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
        while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r')) tok.remove_suffix(1);
        out.emplace_back(tok);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_double(std::string_view token) {
    // std::from_chars for double is available in libstdc++ 11.
    double value = 0.0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    if (!token.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw FormatError("not a number: '" + std::string(token) + "'");
    }
    return value;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::string text;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) text += ',';
            text += format_double(m(i, j));
        }
        text += '\n';
    }
    write_text(path, text);
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        std::vector<double> row;
        for (const auto& tok : split_csv_line(line)) row.push_back(parse_double(tok));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw FormatError(path.string() + ": ragged matrix rows");
        }
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

}  // namespace ionsim::io
