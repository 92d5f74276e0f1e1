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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ionsim {

/// Fixed-length bitstring packed into 64-bit words; bit i lives in word
/// i / 64 at position i % 64. Bits past size() are always zero.
class Bitstring {
public:
    Bitstring() = default;
    explicit Bitstring(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    /// Parse '0'/'1' characters; character i is bit i.
    static Bitstring from_string(std::string_view text);

    std::size_t size() const { return n_; }
    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool value) {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (value) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }
    void flip_all();

    std::size_t popcount() const;
    std::string to_string() const;

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

    friend bool operator==(const Bitstring&, const Bitstring&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

inline std::size_t hamming_distance(const Bitstring& a, const Bitstring& b) {
    std::size_t d = 0;
    const auto wa = a.words();
    const auto wb = b.words();
    for (std::size_t k = 0; k < wa.size(); ++k) d += static_cast<std::size_t>(std::popcount(wa[k] ^ wb[k]));
    return d;
}

/// Bitstrings of equal length with provenance.
struct SampleSet {
    std::size_t n = 0;
    std::vector<Bitstring> samples;
    std::string source;
    std::uint64_t seed = 0;
    std::string parameters;  // free-form, e.g. a JSON fragment

    std::size_t size() const { return samples.size(); }
    void validate() const;
};

}  // namespace ionsim
