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

#include <cstdint>
#include <cmath>
#include <random>

namespace ionsim {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent per-stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for stream `index` of a run seeded with `master`. Streams are
/// addressed by index, so results never depend on how work is scheduled.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
    return Rng(derive_seed(master, index));
}

/// Uniform double in [0, 1) from the top 53 bits; platform independent,
/// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection; platform independent.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

/// Standard normal deviate (Marsaglia polar method); platform independent.
inline double standard_normal(Rng& rng) {
    double u, v, s;
    do {
        u = 2.0 * uniform01(rng) - 1.0;
        v = 2.0 * uniform01(rng) - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

}  // namespace ionsim
