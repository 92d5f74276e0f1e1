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

#include <json.hpp>

#include "ionsim/crystal.hpp"

namespace ionsim {

/// Transverse (y) normal modes of a planar crystal.
///
/// Column k of `vectors` is the mode vector b_{.k}; modes are ordered by
/// descending frequency so column 0 is the centre-of-mass mode in a harmonic
/// trap. Each column is normalized and signed so that sum_i b_ik > 0, or,
/// when that sum vanishes, so that its largest-magnitude component (first
/// one on ties) is positive.
struct ModeSet {
    Eigen::VectorXd frequencies;  // rad/s
    Eigen::MatrixXd vectors;
    Eigen::VectorXd lamb_dicke;   // eta_k; zero until attach_lamb_dicke
    double delta_k = 0.0;         // 1/m

    std::size_t size() const { return static_cast<std::size_t>(frequencies.size()); }
};

/// Matrix A (rad^2/s^2) with A u = omega^2 u for transverse displacements:
/// A_ii = omega_y^2 - sum_{j != i} K / r_ij^3, A_ij = K / r_ij^3, where
/// K = q^2 / (4 pi eps0 M). Throws InvalidArgument when the crystal's
/// dimensionless force residual exceeds `residual_tol`.
Eigen::MatrixXd transverse_hessian(const IonCrystal& crystal, const TrapParams& trap,
                                   double residual_tol = 1e-6);

/// Eigen-decomposition of a transverse Hessian. Throws UnstableCrystalError
/// naming the (descending-order) mode whose eigenvalue is not positive.
ModeSet solve_modes(const Eigen::MatrixXd& hessian);

/// eta = delta_k * sqrt(hbar / (2 M omega_k)).
double lamb_dicke(double delta_k, const IonSpecies& species, double omega_k);

/// Wave-vector difference of two counter-propagating beams, 2 * (2 pi / lambda).
double counter_propagating_delta_k(double wavelength);

/// Fill lamb_dicke using each mode's own frequency.
void attach_lamb_dicke(ModeSet& modes, double delta_k, const IonSpecies& species);

namespace io {

/// CSV "mode,frequency_hz_offset_from_com,eta" (mode index starts at 1, offset
/// (omega_1 - omega_k) / 2pi so lower modes are positive) and
/// the N x N matrix of b_ik as a headerless CSV.
void write_modes(const std::filesystem::path& table, const std::filesystem::path& vectors,
                 const ModeSet& modes);

/// JSON summary of the `top` highest modes.
nlohmann::json modes_summary(const ModeSet& modes, std::size_t top);

}  // namespace io

}  // namespace ionsim
