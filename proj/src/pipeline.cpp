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

#include "ionsim/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "ionsim/analysis.hpp"
#include "ionsim/annealing.hpp"
#include "ionsim/constants.hpp"
#include "ionsim/crystal.hpp"
#include "ionsim/crystal_io.hpp"
#include "ionsim/errors.hpp"
#include "ionsim/ising.hpp"
#include "ionsim/phonons.hpp"
#include "ionsim/sample_io.hpp"
#include "ionsim/sideband.hpp"
#include "ionsim/spindyn.hpp"
#include "ionsim/stability.hpp"
#include "ionsim/table_io.hpp"

namespace ionsim {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

double khz_to_rad(double khz) { return constants::kTwoPi * 1e3 * khz; }
double rad_to_khz(double rad) { return rad / (constants::kTwoPi * 1e3); }

json tone_defaults() {
    return json::parse(R"({
        "mode": 1, "detuning_khz": null, "mu_khz": null,
        "omega_eff_khz": null, "target_j0_khz": null
    })");
}

bool same_kind(const json& def, const json& val) {
    if (def.is_null()) return !val.is_object();
    if (def.is_number()) return val.is_number();
    if (def.is_string()) return val.is_string();
    if (def.is_boolean()) return val.is_boolean();
    if (def.is_array()) return val.is_array();
    return false;
}

void merge(const json& user, json& target, const std::string& path) {
    if (!user.is_object()) throw ConfigError((path.empty() ? std::string("<root>") : path) + ": expected an object");
    for (const auto& [key, val] : user.items()) {
        const std::string where = path.empty() ? key : path + "." + key;
        if (!target.contains(key)) throw ConfigError(where + ": unknown key");
        json& def = target[key];
        if (def.is_object()) {
            merge(val, def, where);
        } else if (key == "tones") {
            if (!val.is_array()) throw ConfigError(where + ": expected an array of tone objects");
            json tones = json::array();
            for (std::size_t k = 0; k < val.size(); ++k) {
                json tone = tone_defaults();
                merge(val[k], tone, where + "[" + std::to_string(k) + "]");
                tones.push_back(std::move(tone));
            }
            def = std::move(tones);
        } else {
            if (!same_kind(def, val)) throw ConfigError(where + ": value has the wrong type");
            def = val;
        }
    }
}

template <typename T>
T get(const json& section, const char* key, const std::string& where) {
    try {
        return section.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": missing or not convertible");
    }
}

fs::path input_path(const json& section, const char* key, const fs::path& out, const char* fallback,
                    const std::string& where) {
    const json& v = section.at(key);
    if (v.is_null()) {
        if (!fallback) throw ConfigError(where + "." + key + ": required");
        return out / fallback;
    }
    return fs::path(v.get<std::string>());
}

TrapParams trap_from(const json& cfg) {
    const auto f = get<std::vector<double>>(cfg, "trap_khz", "");
    if (f.size() != 3) throw ConfigError("trap_khz: expected three frequencies");
    TrapParams t = TrapParams::from_hz(f[0] * 1e3, f[1] * 1e3, f[2] * 1e3);
    t.validate();
    return t;
}

IonSpecies species_from(const json& cfg) {
    const json& s = cfg.at("species");
    IonSpecies sp;
    sp.name = get<std::string>(s, "name", "species");
    sp.mass = get<double>(s, "mass_amu", "species") * constants::kAtomicMassUnit;
    sp.charge = get<double>(s, "charge_e", "species") * constants::kElementaryCharge;
    sp.validate();
    return sp;
}

std::uint64_t require_seed(const json& cfg, const std::string& stage) {
    if (cfg.at("seed").is_null()) throw ConfigError("seed: stage '" + stage + "' is randomized and needs --seed or a seed key");
    return cfg.at("seed").get<std::uint64_t>();
}

ModeSet modes_for(const io::CrystalDocument& doc, double wavelength_nm) {
    ModeSet modes = solve_modes(transverse_hessian(doc.crystal, doc.trap));
    attach_lamb_dicke(modes, counter_propagating_delta_k(wavelength_nm * 1e-9), doc.crystal.species);
    return modes;
}

struct Stage {
    const json& cfg;
    const RunConfig& run;
    std::ostream& log;
    std::size_t workers;
};

void stage_crystal(const Stage& s) {
    const json& c = s.cfg.at("crystal");
    const TrapParams trap = trap_from(s.cfg);
    const IonSpecies species = species_from(s.cfg);
    const auto n = get<std::size_t>(c, "n", "crystal");
    std::optional<Positions> init;
    if (!c.at("init_csv").is_null()) {
        init = Positions(io::positions_from_csv(io::read_text(c.at("init_csv").get<std::string>())) * 1e-6);
    }
    EquilibriumOptions opt;
    opt.tol_force = get<double>(c, "tol_force", "crystal");
    opt.max_restarts = get<std::size_t>(c, "max_restarts", "crystal");
    const IonCrystal crystal = solve_equilibrium(trap, species, n, init, require_seed(s.cfg, "crystal"), opt);
    io::write_crystal_json(s.run.out / "crystal.json", {trap, crystal});
    io::write_text(s.run.out / "crystal.csv", io::crystal_to_csv(crystal));
    s.log << "crystal: n=" << n << " residual=" << equilibrium_residual(crystal, trap)
          << " mean_spacing_um=" << mean_nearest_neighbor_spacing(crystal.positions) * 1e6 << '\n';
}

void stage_modes(const Stage& s) {
    const json& c = s.cfg.at("modes");
    const auto doc = io::read_crystal_json(input_path(c, "crystal_json", s.run.out, "crystal.json", "modes"));
    const ModeSet modes = modes_for(doc, get<double>(c, "wavelength_nm", "modes"));
    io::write_modes(s.run.out / "modes.csv", s.run.out / "mode_vectors.csv", modes);
    io::write_text(s.run.out / "modes_summary.json",
                   io::modes_summary(modes, get<std::size_t>(c, "top", "modes")).dump(2) + "\n");
    s.log << "modes: n=" << modes.size() << " com_hz=" << modes.frequencies[0] / constants::kTwoPi << '\n';
}

void stage_jij(const Stage& s) {
    const json& c = s.cfg.at("jij");
    const auto doc = io::read_crystal_json(input_path(c, "crystal_json", s.run.out, "crystal.json", "jij"));
    const ModeSet modes = modes_for(doc, get<double>(c, "wavelength_nm", "jij"));

    CouplingOptions options;
    options.guard_band = khz_to_rad(get<double>(c, "guard_band_khz", "jij"));
    options.compensate_h = get<bool>(c, "compensate_h", "jij");
    std::optional<std::size_t> truncate = s.run.mode_truncate;
    if (!truncate && !c.at("mode_truncate").is_null()) truncate = c.at("mode_truncate").get<std::size_t>();
    if (truncate) {
        if (*truncate < 1 || *truncate > modes.size()) throw ConfigError("jij.mode_truncate: out of range");
        options.modes = first_modes(*truncate);
    }

    const json& tones_cfg = c.at("tones");
    if (tones_cfg.empty()) throw ConfigError("jij.tones: at least one tone is required");
    std::vector<DriveTone> tones;
    for (std::size_t k = 0; k < tones_cfg.size(); ++k) {
        const json& t = tones_cfg[k];
        const std::string where = "jij.tones[" + std::to_string(k) + "]";
        double mu;
        if (!t.at("detuning_khz").is_null() == !t.at("mu_khz").is_null()) {
            throw ConfigError(where + ": give exactly one of detuning_khz and mu_khz");
        }
        if (!t.at("mu_khz").is_null()) {
            mu = khz_to_rad(t.at("mu_khz").get<double>());
        } else {
            const auto mode = get<std::size_t>(t, "mode", where);
            if (mode < 1 || mode > modes.size()) throw ConfigError(where + ".mode: out of range");
            mu = modes.frequencies[static_cast<Eigen::Index>(mode - 1)] + khz_to_rad(t.at("detuning_khz").get<double>());
        }
        if (!t.at("omega_eff_khz").is_null() == !t.at("target_j0_khz").is_null()) {
            throw ConfigError(where + ": give exactly one of omega_eff_khz and target_j0_khz");
        }
        const double omega = !t.at("omega_eff_khz").is_null()
                                 ? khz_to_rad(t.at("omega_eff_khz").get<double>())
                                 : omega_eff_for_target_j0(modes, mu, khz_to_rad(t.at("target_j0_khz").get<double>()), options);
        tones.push_back(DriveTone::uniform(mu, omega));
    }
    const IsingCoupling coupling = compute_jij(modes, tones, options);
    io::write_coupling_csv(s.run.out / "jij.csv", coupling);
    io::write_matrix_csv(s.run.out / "h.csv", coupling.h);
    io::write_text(s.run.out / "jij_header.json", io::coupling_header(coupling, tones).dump(2) + "\n");
    s.log << "jij: n=" << coupling.size() << " J0_khz=" << rad_to_khz(coupling.J0) << '\n';
}

void stage_anneal(const Stage& s) {
    const json& c = s.cfg.at("anneal");
    const IsingCoupling coupling = io::read_coupling_csv(input_path(c, "j_csv", s.run.out, "jij.csv", "anneal"));
    AnnealParams p;
    p.n_sweep = get<std::size_t>(c, "n_sweep", "anneal");
    p.beta0 = get<double>(c, "beta0", "anneal");
    p.beta1 = get<double>(c, "beta1", "anneal");
    p.m_repeats = get<std::size_t>(c, "m_repeats", "anneal");
    p.energy_scale = get<double>(c, "energy_scale", "anneal");
    const auto conv = get<std::string>(c, "beta_convention", "anneal");
    if (conv == "cycles") {
        p.convention = BetaConvention::kCycles;
    } else if (conv == "angular") {
        p.convention = BetaConvention::kAngular;
    } else {
        throw ConfigError("anneal.beta_convention: expected \"cycles\" or \"angular\"");
    }
    p.seed = require_seed(s.cfg, "anneal");
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("anneal: ") + e.what());
    }
    const AnnealEnsemble ens = anneal_ensemble(coupling, p, s.workers);
    io::write_samples(s.run.out / "anneal_samples.txt", ens.samples);
    io::write_matrix_csv(s.run.out / "covariance.csv", ens.covariance.C);
    const auto [lo, hi] = std::minmax_element(ens.energies.begin(), ens.energies.end());
    const json summary = {{"repeats", p.m_repeats}, {"min_energy_khz", rad_to_khz(*lo)}, {"max_energy_khz", rad_to_khz(*hi)}};
    io::write_text(s.run.out / "anneal_summary.json", summary.dump(2) + "\n");
    s.log << "anneal: repeats=" << p.m_repeats << " min_energy_khz=" << rad_to_khz(*lo) << '\n';
}

void stage_dynamics(const Stage& s) {
    const json& c = s.cfg.at("dynamics");
    const std::string& engine = s.run.action;
    const double t_total = get<double>(c, "t_ms", "dynamics") * 1e-3;
    const auto points = get<std::size_t>(c, "points", "dynamics");
    if (!(t_total > 0.0) || points < 2) throw ConfigError("dynamics: need t_ms > 0 and points >= 2");
    const std::vector<double> grid = uniform_grid(t_total, points);
    const auto n_samples = get<std::size_t>(c, "samples", "dynamics");

    IsingCoupling coupling;
    std::size_t n = get<std::size_t>(c, "n", "dynamics");
    double j0 = khz_to_rad(get<double>(c, "j0_khz", "dynamics"));
    const bool compensate = get<bool>(c, "compensate_h", "dynamics");
    if (engine != "dicke" && !c.at("j_csv").is_null()) {
        coupling = io::read_coupling_csv(c.at("j_csv").get<std::string>(), compensate);
        n = coupling.size();
        j0 = coupling.J0;
    } else {
        if (n < 1) throw ConfigError("dynamics.n: must be at least 1");
        Eigen::MatrixXd J = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n),
                                                      n > 1 ? j0 / static_cast<double>(n - 1) : 0.0);
        coupling = make_coupling(std::move(J), compensate);
    }
    const double b0 = c.at("b0_khz").is_null() ? get<double>(c, "b0_over_j0", "dynamics") * j0
                                                : khz_to_rad(c.at("b0_khz").get<double>());

    std::vector<SpinObservables> obs;
    std::optional<SampleSet> samples;
    const std::uint64_t seed = n_samples ? require_seed(s.cfg, "dynamics") : 0;
    json summary = {{"engine", engine}, {"n", n}, {"J0_khz", rad_to_khz(j0)}, {"B0_khz", rad_to_khz(b0)}};
    if (engine == "dicke") {
        const auto states = evolve_dicke(j0, b0, n, grid);
        for (const auto& st : states) obs.push_back(observables(st));
        if (n_samples) samples = sample_bitstrings(states.back(), n_samples, seed);
    } else if (engine == "exact" || engine == "ramp") {
        std::vector<SpinState> states;
        if (engine == "exact") {
            states = evolve_exact(coupling, FieldProfile::fixed(b0), grid, SpinState::basis(n, 0));
        } else {
            RampSchedule ramp{b0, get<double>(c, "tau_ms", "dynamics") * 1e-3, t_total};
            ramp.validate();
            for (const auto& w : ramp.warnings()) s.log << "warning: " << w << '\n';
            states = evolve_exact(coupling, FieldProfile::ramped(ramp), grid, SpinState::all_plus(n));
            io::write_matrix_csv(s.run.out / "final_correlations.csv", correlations(states.back()).C);
        }
        for (const auto& st : states) obs.push_back(observables(st));
        if (n_samples) samples = sample_bitstrings(states.back(), n_samples, seed);
    } else {
        throw ConfigError("dynamics: engine must be exact, dicke or ramp");
    }
    const Trajectory traj = make_trajectory(grid, obs);
    io::write_trajectory_csv(s.run.out / "trajectory.csv", traj);
    if (samples) {
        samples->parameters = summary.dump();
        io::write_samples(s.run.out / "dynamics_samples.txt", *samples);
    }
    summary["final_C1"] = traj.C1.back();
    summary["final_C2"] = traj.C2.back();
    summary["mean_C2"] = traj.bar_C2.back();
    io::write_text(s.run.out / "dynamics_summary.json", summary.dump(2) + "\n");
    s.log << "dynamics: engine=" << engine << " n=" << n << " mean_C2=" << traj.bar_C2.back() << '\n';
}

void stage_collide(const Stage& s) {
    const json& c = s.cfg.at("collide");
    const auto doc = io::read_crystal_json(input_path(c, "crystal_json", s.run.out, "crystal.json", "collide"));
    GasSpecies gas;
    gas.temperature = get<double>(c, "gas_temperature_k", "collide");
    gas.mass = get<double>(c, "gas_mass_amu", "collide") * constants::kAtomicMassUnit;
    CollisionConfig cc;
    cc.gamma = get<double>(c, "gamma_per_s", "collide");
    cc.t_evolve = get<double>(c, "t_evolve_us", "collide") * 1e-6;
    cc.dt = get<double>(c, "dt_ns", "collide") * 1e-9;
    cc.n_trials = get<std::size_t>(c, "n_trials", "collide");
    cc.thresholds.clear();
    for (double um : get<std::vector<double>>(c, "thresholds_um", "collide")) cc.thresholds.push_back(um * 1e-6);
    try {
        gas.validate();
        cc.validate(doc.trap);
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("collide: ") + e.what());
    }
    const CollisionReport report = run_collision_trials(doc.crystal, doc.trap, gas, cc, require_seed(s.cfg, "collide"), s.workers);
    io::write_trials_csv(s.run.out / "trials.csv", report);
    io::write_text(s.run.out / "collision_summary.json", io::collision_summary(report, gas, cc).dump(2) + "\n");
    s.log << "collide: trials=" << report.trials.size() << " failures=" << report.failures << '\n';
}

void stage_sideband(const Stage& s) {
    const json& c = s.cfg.at("sideband");
    const auto scan = io::read_scan_csv(input_path(c, "scan_csv", s.run.out, nullptr, "sideband"));
    const auto rows = estimate_scan(scan, get<std::vector<double>>(c, "mode_detunings_khz", "sideband"),
                                    get<std::size_t>(c, "window", "sideband"));
    io::write_mode_nbar_csv(s.run.out / "sideband_nbar.csv", rows);
    s.log << "sideband: rows=" << rows.size() << '\n';
}

void stage_sample_test(const Stage& s) {
    const json& c = s.cfg.at("sample_test");
    const std::string& action = s.run.action;
    if (action == "build-bubbles") {
        const SampleSet ref = io::read_samples(input_path(c, "reference", s.run.out, nullptr, "sample_test"));
        const auto m = get<std::size_t>(c, "occupancy", "sample_test");
        const BubblePartition part = build_bubbles(ref, m, require_seed(s.cfg, "sample-test"));
        io::write_text(s.run.out / "partition.json", io::partition_to_json(part).dump(2) + "\n");
        s.log << "sample-test: bubbles=" << part.size() << '\n';
        return;
    }
    if (action != "assign" && action != "chi2") throw ConfigError("sample-test: action must be build-bubbles, assign or chi2");
    const BubblePartition part = io::partition_from_json(
        json::parse(io::read_text(input_path(c, "partition", s.run.out, "partition.json", "sample_test"))));
    const SampleSet samples = io::read_samples(input_path(c, "samples", s.run.out, nullptr, "sample_test"));
    const auto counts = assign_and_count(part, samples);
    if (action == "assign") {
        io::write_text(s.run.out / "counts.json", json({{"counts", counts}}).dump(2) + "\n");
        return;
    }
    const ExpectedDistribution expected = expected_from_reference(part);
    const std::vector<double> observed = merge_counts(counts, expected);
    const auto m_total = static_cast<double>(samples.size());
    const Chi2Result r = chi2_test(observed, expected.probabilities, m_total);
    for (const auto& w : r.warnings) s.log << "warning: " << w << '\n';
    io::write_text(s.run.out / "chi2.json",
                   io::chi2_report(observed, expected.probabilities, m_total, r, expected.merged_catch_all).dump(2) + "\n");
    s.log << "sample-test: chi2=" << r.chi2 << " dof=" << r.dof << " log10_p=" << r.log10_p << '\n';
}

}  // namespace

json default_config() {
    return json::parse(R"({
        "seed": null,
        "workers": 1,
        "trap_khz": [690.0, 2140.0, 167.0],
        "species": {"name": "Yb171", "mass_amu": 170.9363258, "charge_e": 1.0},
        "crystal": {"n": 2, "init_csv": null, "tol_force": 1e-10, "max_restarts": 3},
        "modes": {"crystal_json": null, "wavelength_nm": 411.0, "top": 20},
        "jij": {"crystal_json": null, "wavelength_nm": 411.0, "tones": [], "mode_truncate": null,
                "guard_band_khz": 0.05, "compensate_h": false},
        "anneal": {"j_csv": null, "n_sweep": 100, "beta0": 0.01, "beta1": 1.0, "m_repeats": 100,
                   "beta_convention": "cycles", "energy_scale": 1.0},
        "dynamics": {"n": 8, "j0_khz": 0.31, "b0_over_j0": 1.43, "b0_khz": null, "t_ms": 6.0, "points": 101,
                     "tau_ms": 1.0, "j_csv": null, "compensate_h": true, "samples": 0},
        "collide": {"crystal_json": null, "gas_temperature_k": 6.1, "gas_mass_amu": 2.0, "gamma_per_s": 8000.0,
                    "t_evolve_us": 500.0, "dt_ns": 1.0, "n_trials": 100, "thresholds_um": [0.5, 1.0]},
        "sideband": {"scan_csv": null, "mode_detunings_khz": [], "window": 3},
        "sample_test": {"reference": null, "samples": null, "partition": null, "occupancy": 500}
    })");
}

json resolve_config(const json& document) {
    json cfg = default_config();
    merge(document.is_null() ? json::object() : document, cfg, "");
    return cfg;
}

int run_pipeline(const RunConfig& run, std::ostream& log) {
    std::string stage = run.command;
    try {
        json cfg = resolve_config(run.document);
        if (run.seed) cfg["seed"] = *run.seed;
        if (run.workers) cfg["workers"] = *run.workers;
        if (run.mode_truncate) cfg["jij"]["mode_truncate"] = *run.mode_truncate;
        const auto workers = get<std::size_t>(cfg, "workers", "");
        if (workers < 1) throw ConfigError("workers: must be at least 1");

        fs::create_directories(run.out);
        json echo = {{"command", run.command}, {"action", run.action}, {"config", cfg}};
        io::write_text(run.out / "resolved_config.json", echo.dump(2) + "\n");

        const Stage s{cfg, run, log, workers};
        if (run.command == "crystal") {
            stage_crystal(s);
        } else if (run.command == "modes") {
            stage_modes(s);
        } else if (run.command == "jij") {
            stage_jij(s);
        } else if (run.command == "anneal") {
            stage_anneal(s);
        } else if (run.command == "dynamics") {
            stage_dynamics(s);
        } else if (run.command == "collide") {
            stage_collide(s);
        } else if (run.command == "sideband") {
            stage_sideband(s);
        } else if (run.command == "sample-test") {
            stage_sample_test(s);
        } else {
            throw ConfigError("unknown command '" + run.command + "'");
        }
        return 0;
    } catch (const NumericError& e) {
        log << "error [" << stage << "]: " << e.what() << '\n';
        return 3;
    } catch (const CapacityError& e) {
        log << "error [" << stage << "]: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        log << "error [" << stage << "]: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        log << "error [" << stage << "]: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        log << "error [" << stage << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        log << "error [" << stage << "]: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace ionsim
