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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

namespace ionsim {

/// One command-line invocation.
///
/// `document` is the user's configuration file (possibly empty). Frequencies
/// in it are ordinary frequencies in kHz; the 2pi is applied internally.
/// Every key is checked against the built-in defaults and unknown keys are
/// rejected with their path.
struct RunConfig {
    std::string command;                  // crystal, modes, jij, anneal, dynamics, collide, sideband, sample-test
    std::string action;                   // dynamics: exact|dicke|ramp; sample-test: build-bubbles|assign|chi2
    nlohmann::json document = nlohmann::json::object();
    std::optional<std::uint64_t> seed;    // overrides document["seed"]
    std::optional<std::size_t> workers;   // overrides document["workers"]
    std::optional<std::size_t> mode_truncate;  // jij: keep the highest k modes
    std::filesystem::path out = ".";
};

/// Defaults for every configuration section.
nlohmann::json default_config();

/// Merge `document` over the defaults; throws ConfigError naming the key
/// path of any unknown key or mistyped value.
nlohmann::json resolve_config(const nlohmann::json& document);

/// Exit status: 0 success, 2 configuration or input error, 3 numeric failure.
/// Writes `resolved_config.json` and the stage outputs under `config.out`;
/// diagnostics go to `log`.
int run_pipeline(const RunConfig& config, std::ostream& log);

}  // namespace ionsim
