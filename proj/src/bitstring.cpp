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

#include "ionsim/bitstring.hpp"

#include "ionsim/errors.hpp"

namespace ionsim {

Bitstring Bitstring::from_string(std::string_view text) {
    Bitstring b(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '1') {
            b.set(i, true);
        } else if (text[i] != '0') {
            throw FormatError("bitstring characters must be '0' or '1'");
        }
    }
    return b;
}

void Bitstring::flip_all() {
    for (auto& w : words_) w = ~w;
    if (n_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
}

std::size_t Bitstring::popcount() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

std::string Bitstring::to_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i) {
        if (get(i)) s[i] = '1';
    }
    return s;
}

void SampleSet::validate() const {
    if (samples.empty()) throw InvalidArgument("sample set is empty");
    for (const auto& s : samples) {
        if (s.size() != n) throw InvalidArgument("sample length does not match n");
    }
}

}  // namespace ionsim
