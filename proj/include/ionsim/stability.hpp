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

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ionsim/constants.hpp"
#include "ionsim/crystal.hpp"
#include "ionsim/random.hpp"

namespace ionsim {

/// Background gas; hydrogen molecules by default.
struct GasSpecies {
    double mass = 2.0 * constants::kAtomicMassUnit;  // kg
    double temperature = 0.0;               // K

    static GasSpecies hydrogen(double temperature_k);
    void validate() const;
};

struct CollisionConfig {
    double gamma = 8e3;          // 1/s, isotropic damping rate
    double t_evolve = 500e-6;    // s
    double dt = 1e-9;            // s
    std::size_t n_trials = 100;
    std::vector<double> thresholds = {0.5e-6, 1e-6};  // m

    /// Also enforces dt <= 0.02 * 2pi / omega_y.
    void validate(const TrapParams& trap) const;
};

/// Maxwell-Boltzmann velocity: each component normal with variance kT/m.
Eigen::Vector3d sample_gas_velocity(const GasSpecies& gas, Rng& rng);
Eigen::Vector3d sample_gas_velocity(const GasSpecies& gas, std::uint64_t seed);

/// Head-on elastic transfer: 2 v / (1 + M/m), direction kept.
Eigen::Vector3d collision_kick(const Eigen::Vector3d& v_gas, double ion_mass, double gas_mass);

struct MdState {
    Positions positions;   // m
    Positions velocities;  // m/s
};

/// Called every `stride` steps with time (s) and SI state.
struct MdObserver {
    std::size_t stride = 0;
    std::function<void(double, const MdState&)> callback;
};

/// M r'' = -grad U - M gamma r' by velocity Verlet with implicit damping on
/// the half-kick. The step is shortened so that t_evolve is an integer number
/// of steps. Throws IntegratorError when two ions come within 0.01 l0.
MdState damped_md(const Positions& positions, const Positions& velocities, const TrapParams& trap,
                  const IonSpecies& species, double gamma, double t_evolve, double dt,
                  const MdObserver& observer = {});

/// Harmonic + Coulomb + kinetic energy in joules.
double mechanical_energy(const MdState& state, const TrapParams& trap, const IonSpecies& species);

/// max_i |r_i - r'_i| by index.
double max_deviation(const Positions& final_positions, const Positions& reference);

struct MatchedDeviation {
    std::vector<std::size_t> permutation;  // final ion i matched to reference ion permutation[i]
    double deviation = 0.0;
};

/// Relabeling minimizing the max displacement max_i |r_{pi_i} - r'_i|, ties
/// broken by the smallest sum of squared displacements (Hungarian method on
/// the admissible pairs). Never exceeds max_deviation, since the identity is
/// a candidate.
MatchedDeviation matched_deviation(const Positions& final_positions, const Positions& reference);

struct TrialRecord {
    std::size_t trial = 0;
    std::size_t kicked_ion = 0;
    double gas_speed = 0.0;     // m/s
    double max_dev = 0.0;       // m
    double matched_dev = 0.0;   // m
    bool failed = false;
    std::string error;
};

struct CollisionReport {
    std::vector<TrialRecord> trials;
    std::vector<double> thresholds;
    std::vector<double> raw_exceedance;      // fraction of successful trials with max_dev > threshold
    std::vector<double> matched_exceedance;  // same for matched_dev
    std::size_t failures = 0;
};

/// Trial t draws from stream derive_seed(seed, t): gas velocity, then the
/// kicked ion (uniform). Failed trials are recorded and excluded from the fractions.
CollisionReport run_collision_trials(const IonCrystal& crystal, const TrapParams& trap, const GasSpecies& gas,
                                     const CollisionConfig& config, std::uint64_t seed, std::size_t workers = 1);

namespace io {
/// CSV "trial,kicked_ion,gas_speed,max_dev_um,matched_dev_um,failed".
void write_trials_csv(const std::filesystem::path& path, const CollisionReport& report);
nlohmann::json collision_summary(const CollisionReport& report, const GasSpecies& gas, const CollisionConfig& config);
}  // namespace io

}  // namespace ionsim
