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

#include "ionsim/analysis.hpp"

#include <algorithm>

#include "ionsim/errors.hpp"
#include "ionsim/random.hpp"

namespace ionsim {

CovarianceMatrix covariance(const SampleSet& samples, bool assume_z2) {
    samples.validate();
    const std::size_t m = samples.size();
    if (!assume_z2 && m < 2) throw InvalidArgument("covariance without the Z2 shortcut needs M >= 2");
    const auto n = static_cast<Eigen::Index>(samples.n);
    Eigen::MatrixXd spins(static_cast<Eigen::Index>(m), n);
    for (std::size_t r = 0; r < m; ++r) {
        for (Eigen::Index i = 0; i < n; ++i) {
            spins(static_cast<Eigen::Index>(r), i) = samples.samples[r].get(static_cast<std::size_t>(i)) ? -1.0 : 1.0;
        }
    }
    const double inv_m = 1.0 / static_cast<double>(m);
    Eigen::MatrixXd c = (spins.transpose() * spins) * inv_m;
    if (!assume_z2) {
        const Eigen::VectorXd mean = spins.colwise().mean().transpose();
        c -= mean * mean.transpose();
    }
    c.diagonal().setZero();
    return {std::move(c)};
}

std::size_t BubblePartition::assign(const Bitstring& x) const {
    if (x.size() != n) throw InvalidArgument("bitstring length does not match the partition");
    for (std::size_t b = 0; b < bubbles.size(); ++b) {
        if (hamming_distance(x, bubbles[b].center) <= bubbles[b].radius) return b;
    }
    // Unreachable for a well-formed partition: the last bubble covers everything.
    throw InvalidArgument("partition has no catch-all bubble");
}

BubblePartition build_bubbles(const SampleSet& reference, std::size_t m, std::uint64_t seed) {
    reference.validate();
    if (m == 0) throw InvalidArgument("bubble occupancy must be at least 1");
    BubblePartition part;
    part.n = reference.n;
    part.occupancy = m;

    std::vector<std::size_t> remaining(reference.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
    std::vector<std::size_t> dist;
    Rng rng(seed);

    while (!remaining.empty()) {
        const std::size_t pick = remaining[uniform_index(rng, remaining.size())];
        const Bitstring& center = reference.samples[pick];
        dist.resize(remaining.size());
        for (std::size_t k = 0; k < remaining.size(); ++k) {
            dist[k] = hamming_distance(center, reference.samples[remaining[k]]);
        }
        std::size_t radius;
        if (remaining.size() <= m) {
            radius = *std::max_element(dist.begin(), dist.end());
        } else {
            std::vector<std::size_t> sorted = dist;
            std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m - 1), sorted.end());
            radius = sorted[m - 1];
        }
        std::vector<std::size_t> kept;
        kept.reserve(remaining.size());
        std::size_t removed = 0;
        for (std::size_t k = 0; k < remaining.size(); ++k) {
            if (dist[k] <= radius) {
                ++removed;
            } else {
                kept.push_back(remaining[k]);
            }
        }
        part.bubbles.push_back({center, radius, removed});
        remaining.swap(kept);
    }
    part.bubbles.push_back({Bitstring(reference.n), reference.n, 0});
    return part;
}

std::vector<std::size_t> assign_and_count(const BubblePartition& partition, const SampleSet& samples) {
    std::vector<std::size_t> counts(partition.size(), 0);
    for (const auto& s : samples.samples) ++counts[partition.assign(s)];
    return counts;
}

ExpectedDistribution expected_from_reference(const BubblePartition& partition) {
    ExpectedDistribution out;
    double total = 0.0;
    for (const auto& b : partition.bubbles) total += static_cast<double>(b.reference_count);
    if (!(total > 0.0)) throw InvalidArgument("partition carries no reference counts");
    for (const auto& b : partition.bubbles) out.probabilities.push_back(static_cast<double>(b.reference_count) / total);
    if (out.probabilities.size() >= 2 && partition.bubbles.back().reference_count == 0) {
        out.probabilities.pop_back();
        out.merged_catch_all = true;
    }
    return out;
}

std::vector<double> merge_counts(const std::vector<std::size_t>& counts, const ExpectedDistribution& expected) {
    std::vector<double> out(counts.begin(), counts.end());
    if (expected.merged_catch_all && out.size() >= 2) {
        out[out.size() - 2] += out.back();
        out.pop_back();
    }
    return out;
}

namespace io {

nlohmann::json chi2_report(const std::vector<double>& counts, const std::vector<double>& expected_probs,
                           double m_total, const Chi2Result& result, bool merged_catch_all) {
    nlohmann::json j = {{"counts", counts}, {"chi2", result.chi2}, {"dof", result.dof}, {"merged_catch_all", merged_catch_all}};
    std::vector<double> expected;
    for (double p : expected_probs) expected.push_back(p * m_total);
    j["expected"] = expected;
    if (result.log10_p < -300.0) {
        j["log10_p"] = result.log10_p;
    } else {
        j["p_value"] = result.p_value;
    }
    if (!result.warnings.empty()) j["warnings"] = result.warnings;
    return j;
}

nlohmann::json partition_to_json(const BubblePartition& partition) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& b : partition.bubbles) {
        list.push_back({{"center", b.center.to_string()}, {"radius", b.radius}, {"reference_count", b.reference_count}});
    }
    return {{"n", partition.n}, {"occupancy", partition.occupancy}, {"bubbles", list}};
}

BubblePartition partition_from_json(const nlohmann::json& j) {
    try {
        BubblePartition p;
        p.n = j.at("n").get<std::size_t>();
        p.occupancy = j.at("occupancy").get<std::size_t>();
        for (const auto& b : j.at("bubbles")) {
            Bubble bubble{Bitstring::from_string(b.at("center").get<std::string>()), b.at("radius").get<std::size_t>(),
                          b.at("reference_count").get<std::size_t>()};
            if (bubble.center.size() != p.n) throw FormatError("bubble centre length does not match n");
            p.bubbles.push_back(std::move(bubble));
        }
        if (p.bubbles.empty() || p.bubbles.back().radius < p.n) throw FormatError("partition lacks a catch-all bubble");
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("partition JSON: ") + e.what());
    }
}

}  // namespace io

}  // namespace ionsim
