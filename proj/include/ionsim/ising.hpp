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
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "ionsim/constants.hpp"
#include "ionsim/phonons.hpp"

namespace ionsim {

/// One beat-note tone of the spin-dependent force.
struct DriveTone {
    double mu = 0.0;            // beat-note angular frequency, rad/s
    Eigen::VectorXd omega_eff;  // AC-Stark amplitude per ion (rad/s); one entry means uniform

    static DriveTone uniform(double mu, double omega_eff);
    double omega_at(Eigen::Index ion) const { return omega_eff.size() == 1 ? omega_eff[0] : omega_eff[ion]; }
};

/// H = sum_{i != j} J_ij Z_i Z_j + sum_i h_i Z_i, all in rad/s.
///
/// The coupling formula also yields i == j terms. They are constants in the
/// Ising part, so J carries a zero diagonal, but they still feed the
/// longitudinal field, which sums over every j; they are kept in self_coupling.
struct IsingCoupling {
    Eigen::MatrixXd J;  // symmetric, zero diagonal
    Eigen::VectorXd self_coupling;
    Eigen::VectorXd h;
    double J0 = 0.0;    // (1/N) sum_{i != j} J_ij

    std::size_t size() const { return static_cast<std::size_t>(J.rows()); }
};

struct CouplingOptions {
    double guard_band = constants::kTwoPi * 50.0;  // rad/s around every mode
    std::vector<std::size_t> modes;                // restrict the mode sum; empty = all modes
    bool compensate_h = false;                     // zero the longitudinal field
};

/// Mode subset {0, ..., count - 1}.
std::vector<std::size_t> first_modes(std::size_t count);

/// J_ij = sum_tones Omega_i Omega_j / 16 * sum_k eta_k^2 b_ik b_jk / (mu - omega_k),
/// diagonal zeroed. Throws ResonanceError naming the first mode inside a
/// tone's guard band.
IsingCoupling compute_jij(const ModeSet& modes, const std::vector<DriveTone>& tones,
                          const CouplingOptions& options = {});

/// h_i = 2 (sum_{j != i} J_ij + self_coupling_i).
Eigen::VectorXd longitudinal_field(const IsingCoupling& coupling);

/// Coupling through mode k alone (rank one before the diagonal is zeroed).
IsingCoupling single_mode_coupling(const ModeSet& modes, std::size_t k, const DriveTone& tone,
                                   const CouplingOptions& options = {});

/// Kac-normalized strength (1/N) sum_{i != j} J_ij.
double kac_strength(const Eigen::MatrixXd& J);

/// Wrap an externally produced J: validates symmetry, moves the diagonal
/// into self_coupling, fills h and J0.
IsingCoupling make_coupling(Eigen::MatrixXd J, bool compensate_h = false);

/// Uniform Omega_eff for which a single tone at `mu` yields Kac strength
/// `target_j0` (J scales as Omega_eff^2).
double omega_eff_for_target_j0(const ModeSet& modes, double mu, double target_j0,
                               const CouplingOptions& options = {});

struct Dephasing {
    double collective = 1.0;  // exp(-2 n eta^2 Omega^2 / delta^2)
    double per_spin = 1.0;    // exp(-2 eta^2 Omega^2 / delta^2)
};

/// Residual spin-phonon dephasing after adiabatic elimination.
Dephasing residual_dephasing(double eta, double omega_eff, double delta, std::size_t n);

namespace io {

/// Dense N x N CSV in rad/s; the diagonal holds self_coupling.
void write_coupling_csv(const std::filesystem::path& path, const IsingCoupling& coupling);

/// {"n", "J0_hz", "tones": [{"mu_hz", "omega_eff_hz"}]}; frequencies ordinary.
nlohmann::json coupling_header(const IsingCoupling& coupling, const std::vector<DriveTone>& tones);

IsingCoupling read_coupling_csv(const std::filesystem::path& path, bool compensate_h = false);

}  // namespace io

}  // namespace ionsim
