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

#include <json.hpp>

#include "ionsim/crystal.hpp"

namespace ionsim::io {

/// Crystal plus the trap it was solved in, as stored on disk.
struct CrystalDocument {
    TrapParams trap;
    IonCrystal crystal;
};

// JSON layout: {"n", "trap_hz": [fx, fy, fz], "species": {"name", "mass_kg",
// "charge_c"}, "positions_um": [[x, y, z], ...]}. Frequencies are ordinary
// frequencies in Hz.
nlohmann::json crystal_to_json(const CrystalDocument& doc);
CrystalDocument crystal_from_json(const nlohmann::json& j);

void write_crystal_json(const std::filesystem::path& path, const CrystalDocument& doc);
CrystalDocument read_crystal_json(const std::filesystem::path& path);

/// CSV with header "label,x_um,y_um,z_um".
std::string crystal_to_csv(const IonCrystal& crystal);
Positions positions_from_csv(const std::string& text);

}  // namespace ionsim::io
