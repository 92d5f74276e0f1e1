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

#include "ionsim/crystal_io.hpp"

#include <array>
#include <sstream>
#include <vector>

#include "ionsim/constants.hpp"
#include "ionsim/errors.hpp"
#include "ionsim/table_io.hpp"

namespace ionsim::io {

nlohmann::json crystal_to_json(const CrystalDocument& doc) {
    using constants::kTwoPi;
    const IonCrystal& c = doc.crystal;
    nlohmann::json pos = nlohmann::json::array();
    for (Eigen::Index i = 0; i < c.positions.rows(); ++i) {
        pos.push_back({c.positions(i, 0) * 1e6, c.positions(i, 1) * 1e6, c.positions(i, 2) * 1e6});
    }
    return {
        {"n", c.size()},
        {"trap_hz", {doc.trap.omega_x / kTwoPi, doc.trap.omega_y / kTwoPi, doc.trap.omega_z / kTwoPi}},
        {"species", {{"name", c.species.name}, {"mass_kg", c.species.mass}, {"charge_c", c.species.charge}}},
        {"positions_um", pos},
    };
}

CrystalDocument crystal_from_json(const nlohmann::json& j) {
    try {
        CrystalDocument doc;
        const auto trap_hz = j.at("trap_hz").get<std::vector<double>>();
        if (trap_hz.size() != 3) throw FormatError("trap_hz must have three entries");
        doc.trap = TrapParams::from_hz(trap_hz[0], trap_hz[1], trap_hz[2]);
        const auto& sp = j.at("species");
        doc.crystal.species.name = sp.value("name", std::string("custom"));
        doc.crystal.species.mass = sp.at("mass_kg").get<double>();
        doc.crystal.species.charge = sp.at("charge_c").get<double>();
        const auto rows = j.at("positions_um").get<std::vector<std::vector<double>>>();
        const auto n = j.at("n").get<std::size_t>();
        if (rows.size() != n) throw FormatError("positions_um length does not match n");
        doc.crystal.positions.resize(static_cast<Eigen::Index>(n), 3);
        doc.crystal.labels.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[i].size() != 3) throw FormatError("positions_um rows must have three entries");
            for (int a = 0; a < 3; ++a) doc.crystal.positions(static_cast<Eigen::Index>(i), a) = rows[i][static_cast<std::size_t>(a)] * 1e-6;
            doc.crystal.labels[i] = i;
        }
        doc.trap.validate();
        doc.crystal.species.validate();
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("crystal JSON: ") + e.what());
    }
}

void write_crystal_json(const std::filesystem::path& path, const CrystalDocument& doc) {
    write_text(path, crystal_to_json(doc).dump(2) + "\n");
}

CrystalDocument read_crystal_json(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return crystal_from_json(j);
}

std::string crystal_to_csv(const IonCrystal& crystal) {
    std::string out = "label,x_um,y_um,z_um\n";
    for (Eigen::Index i = 0; i < crystal.positions.rows(); ++i) {
        out += std::to_string(i);
        for (int a = 0; a < 3; ++a) out += "," + format_double(crystal.positions(i, a) * 1e6);
        out += '\n';
    }
    return out;
}

Positions positions_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::array<double, 3>> rows;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (header) {
            header = false;
            if (line.rfind("label", 0) == 0) continue;
        }
        const auto tok = split_csv_line(line);
        if (tok.size() != 4) throw FormatError("crystal CSV rows need 4 columns");
        rows.push_back({parse_double(tok[1]) * 1e-6, parse_double(tok[2]) * 1e-6, parse_double(tok[3]) * 1e-6});
    }
    Positions p(static_cast<Eigen::Index>(rows.size()), 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int a = 0; a < 3; ++a) p(static_cast<Eigen::Index>(i), a) = rows[i][static_cast<std::size_t>(a)];
    }
    return p;
}

}  // namespace ionsim::io
