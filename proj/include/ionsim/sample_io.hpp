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

#include <filesystem>
#include <string>

#include "ionsim/bitstring.hpp"

namespace ionsim::io {

// Text layout:
//   # ionsim-samples n=<bits> M=<count> seed=<u64> source=<rest of line>
//   # parameters=<free text>          (optional)
//   0110...                           (one line per sample, character i = bit i)
std::string samples_to_text(const SampleSet& samples);
SampleSet samples_from_text(const std::string& text);

// Binary layout, all integers little-endian:
//   8 bytes  magic "IONSMP01"
//   u32 n, u64 M, u64 seed, u32 source_len, source bytes
//   M * ceil(n / 64) u64 words; bit i of a sample is bit (i % 64) of word i / 64.
std::string samples_to_binary(const SampleSet& samples);
SampleSet samples_from_binary(const std::string& bytes);

/// Chooses the format from the extension: ".bin" is binary, anything else text.
void write_samples(const std::filesystem::path& path, const SampleSet& samples);
SampleSet read_samples(const std::filesystem::path& path);

}  // namespace ionsim::io
