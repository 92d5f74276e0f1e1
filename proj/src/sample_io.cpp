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

#include "ionsim/sample_io.hpp"

#include <charconv>
#include <cstring>
#include <sstream>

#include "ionsim/errors.hpp"
#include "ionsim/table_io.hpp"

namespace ionsim::io {
namespace {

constexpr char kMagic[8] = {'I', 'O', 'N', 'S', 'M', 'P', '0', '1'};
constexpr std::string_view kHeader = "# ionsim-samples ";

template <typename T>
void put_le(std::string& out, T value) {
    for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<char>((value >> (8 * b)) & 0xff));
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw FormatError("binary sample file truncated");
    T value = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        value |= static_cast<T>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
    }
    pos += sizeof(T);
    return value;
}

std::uint64_t parse_u64(std::string_view token, const char* what) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw FormatError(std::string("bad ") + what + " in sample header");
    }
    return v;
}

std::string_view field(std::string_view line, std::string_view key) {
    const auto at = line.find(key);
    if (at == std::string_view::npos) throw FormatError("sample header lacks " + std::string(key));
    auto rest = line.substr(at + key.size());
    return rest.substr(0, rest.find(' '));
}

}  // namespace

std::string samples_to_text(const SampleSet& samples) {
    std::ostringstream os;
    os << kHeader << "n=" << samples.n << " M=" << samples.size() << " seed=" << samples.seed
       << " source=" << samples.source << '\n';
    if (!samples.parameters.empty()) os << "# parameters=" << samples.parameters << '\n';
    for (const auto& s : samples.samples) os << s.to_string() << '\n';
    return os.str();
}

SampleSet samples_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind(kHeader, 0) != 0) throw FormatError("missing sample header");
    SampleSet out;
    const std::string_view header(line);
    out.n = parse_u64(field(header, "n="), "n");
    const std::uint64_t m = parse_u64(field(header, "M="), "M");
    out.seed = parse_u64(field(header, "seed="), "seed");
    const auto src = header.find("source=");
    if (src != std::string_view::npos) out.source = std::string(header.substr(src + 7));
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# parameters=", 0) == 0) {
            out.parameters = line.substr(13);
            continue;
        }
        if (line[0] == '#') continue;
        auto b = Bitstring::from_string(line);
        if (b.size() != out.n) throw FormatError("sample line length does not match n");
        out.samples.push_back(std::move(b));
    }
    if (out.samples.size() != m) throw FormatError("sample count does not match header M");
    return out;
}

std::string samples_to_binary(const SampleSet& samples) {
    std::string out(kMagic, sizeof(kMagic));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(samples.n));
    put_le<std::uint64_t>(out, samples.size());
    put_le<std::uint64_t>(out, samples.seed);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(samples.source.size()));
    out += samples.source;
    for (const auto& s : samples.samples) {
        for (auto w : s.words()) put_le<std::uint64_t>(out, w);
    }
    return out;
}

SampleSet samples_from_binary(const std::string& bytes) {
    if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw FormatError("bad binary sample magic");
    }
    std::size_t pos = sizeof(kMagic);
    SampleSet out;
    out.n = get_le<std::uint32_t>(bytes, pos);
    const auto m = get_le<std::uint64_t>(bytes, pos);
    out.seed = get_le<std::uint64_t>(bytes, pos);
    const auto len = get_le<std::uint32_t>(bytes, pos);
    if (pos + len > bytes.size()) throw FormatError("binary sample file truncated");
    out.source = bytes.substr(pos, len);
    pos += len;
    const std::size_t words = (out.n + 63) / 64;
    if ((bytes.size() - pos) != m * words * 8) throw FormatError("binary sample payload has the wrong size");
    out.samples.reserve(m);
    const std::uint64_t tail_mask = out.n % 64 ? (std::uint64_t{1} << (out.n % 64)) - 1 : ~std::uint64_t{0};
    for (std::uint64_t r = 0; r < m; ++r) {
        Bitstring b(out.n);
        auto w = b.words();
        for (std::size_t k = 0; k < words; ++k) w[k] = get_le<std::uint64_t>(bytes, pos);
        if (words && (w[words - 1] & ~tail_mask)) throw FormatError("binary sample has bits set past n");
        out.samples.push_back(std::move(b));
    }
    return out;
}

void write_samples(const std::filesystem::path& path, const SampleSet& samples) {
    write_text(path, path.extension() == ".bin" ? samples_to_binary(samples) : samples_to_text(samples));
}

SampleSet read_samples(const std::filesystem::path& path) {
    const std::string data = read_text(path);
    return path.extension() == ".bin" ? samples_from_binary(data) : samples_from_text(data);
}

}  // namespace ionsim::io
