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

#include "ionsim/hungarian.hpp"

#include <algorithm>
#include <limits>

#include "ionsim/errors.hpp"

namespace ionsim {

std::vector<std::size_t> solve_assignment(const Eigen::MatrixXd& cost) {
    if (cost.rows() != cost.cols()) throw InvalidArgument("assignment needs a square cost matrix");
    if (!cost.allFinite()) throw InvalidArgument("assignment costs must be finite");
    const std::size_t n = static_cast<std::size_t>(cost.rows());
    if (n == 0) return {};
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // 1-based arrays; column 0 is a virtual column holding the row being inserted.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    std::vector<double> minv(n + 1);
    std::vector<char> used(n + 1);

    for (std::size_t row = 1; row <= n; ++row) {
        match[0] = row;
        std::size_t col0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col0] = 1;
            const std::size_t r0 = match[col0];
            double delta = kInf;
            std::size_t col1 = 0;
            for (std::size_t c = 1; c <= n; ++c) {
                if (used[c]) continue;
                const double reduced = cost(static_cast<Eigen::Index>(r0 - 1), static_cast<Eigen::Index>(c - 1)) - u[r0] - v[c];
                if (reduced < minv[c]) {
                    minv[c] = reduced;
                    way[c] = col0;
                }
                if (minv[c] < delta) {
                    delta = minv[c];
                    col1 = c;
                }
            }
            for (std::size_t c = 0; c <= n; ++c) {
                if (used[c]) {
                    u[match[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }

    std::vector<std::size_t> assignment(n);
    for (std::size_t c = 1; c <= n; ++c) assignment[match[c] - 1] = c - 1;
    return assignment;
}

}  // namespace ionsim
