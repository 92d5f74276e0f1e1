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

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include <json.hpp>

#include "ionsim/errors.hpp"
#include "ionsim/pipeline.hpp"
#include "ionsim/table_io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ionsim: trapped-ion crystal, phonon, Ising and sampling toolkit"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::string out = ".";
    auto* seed_opt = app.add_option("--seed", seed, "Master RNG seed");
    auto* workers_opt = app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out, "Output directory");

    ionsim::RunConfig run;
    std::size_t truncate = 0;
    CLI::Option* truncate_opt = nullptr;

    app.add_subcommand("crystal", "Equilibrium crystal (crystal.json, crystal.csv)");
    app.add_subcommand("modes", "Transverse modes (modes.csv, mode_vectors.csv, modes_summary.json)");
    auto* jij = app.add_subcommand("jij", "Ising couplings (jij.csv, h.csv, jij_header.json)");
    truncate_opt = jij->add_option("--mode-truncate", truncate, "Keep only the k highest modes")->check(CLI::PositiveNumber);
    app.add_subcommand("anneal", "Simulated annealing (anneal_samples.txt, covariance.csv)");
    auto* dyn = app.add_subcommand("dynamics", "Spin dynamics (trajectory.csv)");
    dyn->add_option("engine", run.action, "exact | dicke | ramp")
        ->required()
        ->check(CLI::IsMember({"exact", "dicke", "ramp"}));
    app.add_subcommand("collide", "Collision Monte Carlo (trials.csv, collision_summary.json)");
    app.add_subcommand("sideband", "Phonon number from a sideband scan (sideband_nbar.csv)");
    auto* st = app.add_subcommand("sample-test", "Bubble coarse graining and chi-square test");
    st->add_option("action", run.action, "build-bubbles | assign | chi2")
        ->required()
        ->check(CLI::IsMember({"build-bubbles", "assign", "chi2"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    run.command = app.get_subcommands().front()->get_name();
    run.out = out;
    if (*seed_opt) run.seed = seed;
    if (*workers_opt) run.workers = workers;
    if (*truncate_opt) run.mode_truncate = truncate;
    if (!config_path.empty()) {
        try {
            run.document = nlohmann::json::parse(ionsim::io::read_text(config_path));
        } catch (const std::exception& e) {
            std::cerr << "error [config]: " << e.what() << '\n';
            return 2;
        }
    }
    return ionsim::run_pipeline(run, std::cerr);
}
