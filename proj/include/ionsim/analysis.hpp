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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ionsim/bitstring.hpp"

namespace ionsim {

/// Spin-spin covariance with the diagonal zeroed.
struct CovarianceMatrix {
    Eigen::MatrixXd C;
};

/// Spin values s = +1 for bit 0, -1 for bit 1. With `assume_z2` the means
/// are taken as zero, C_ij = (1/M) sum s_i s_j; otherwise the empirical
/// means are subtracted (needs M >= 2).
CovarianceMatrix covariance(const SampleSet& samples, bool assume_z2);

struct Bubble {
    Bitstring center;
    std::size_t radius = 0;
    std::size_t reference_count = 0;  // reference points removed by this bubble
};

/// Ordered Hamming-ball partition of {0,1}^n. A string belongs to the first
/// bubble that covers it; the final bubble has radius n and covers everything.
struct BubblePartition {
    std::size_t n = 0;
    std::size_t occupancy = 0;
    std::vector<Bubble> bubbles;

    std::size_t assign(const Bitstring& x) const;
    std::size_t size() const { return bubbles.size(); }
};

/// Greedy construction from a reference sample: repeatedly centre a bubble on
/// a uniformly random remaining point with the smallest radius enclosing at
/// least m remaining points (all of them if fewer remain), remove the
/// enclosed points, and finally append the catch-all bubble.
BubblePartition build_bubbles(const SampleSet& reference, std::size_t m, std::uint64_t seed);

/// Counts per bubble under the first-cover rule; sums to samples.size().
std::vector<std::size_t> assign_and_count(const BubblePartition& partition, const SampleSet& samples);

/// Bin probabilities estimated from the reference counts. The catch-all
/// holds no reference points by construction, so when empty it is merged
/// into the last constructed bubble (`merged_catch_all`).
struct ExpectedDistribution {
    std::vector<double> probabilities;
    bool merged_catch_all = false;
};
ExpectedDistribution expected_from_reference(const BubblePartition& partition);

/// Apply the same bin merge to a count histogram.
std::vector<double> merge_counts(const std::vector<std::size_t>& counts, const ExpectedDistribution& expected);

struct Chi2Result {
    double chi2 = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;  // 0 when it underflows; see log10_p
    double log10_p = 0.0;
    std::vector<std::string> warnings;
};

/// Pearson chi-square against expected probabilities. Throws InvalidArgument
/// when the probabilities do not sum to 1 (1e-9) or an expected count is 0.
Chi2Result chi2_test(std::span<const double> observed, std::span<const double> expected_probs, double m_total);

/// Upper tail of the chi-square distribution, Q(dof/2, x/2).
double chi2_upper_tail(double x, double dof);
/// Natural log of the upper tail; finite far below the double range.
double log_chi2_upper_tail(double x, double dof);

/// Regularized upper incomplete gamma Q(a, x) and its natural log.
double gamma_q(double a, double x);
double log_gamma_q(double a, double x);

namespace io {
/// {counts, expected, chi2, dof, p_value | log10_p}.
nlohmann::json chi2_report(const std::vector<double>& counts, const std::vector<double>& expected_probs,
                           double m_total, const Chi2Result& result, bool merged_catch_all);
nlohmann::json partition_to_json(const BubblePartition& partition);
BubblePartition partition_from_json(const nlohmann::json& j);
}  // namespace io

}  // namespace ionsim
