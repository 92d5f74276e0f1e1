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
#include <optional>
#include <string>
#include <vector>

namespace ionsim {

/// One row per ion, columns (x, y, z).
using Positions = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Angular trap frequencies in rad/s. The crystal plane is x-z; y is the
/// transverse (strongest) axis in the planar regime.
struct TrapParams {
    double omega_x = 0.0;
    double omega_y = 0.0;
    double omega_z = 0.0;

    /// Build from ordinary frequencies in Hz.
    static TrapParams from_hz(double fx, double fy, double fz);

    void validate() const;

    /// omega_y exceeds both in-plane frequencies.
    bool planar() const { return omega_y > omega_x && omega_y > omega_z; }

    TrapParams scaled(double s) const { return {s * omega_x, s * omega_y, s * omega_z}; }
};

struct IonSpecies {
    std::string name = "Yb171";
    double mass = 0.0;    // kg
    double charge = 0.0;  // C

    static IonSpecies yb171();
    void validate() const;

    /// Coulomb coupling q^2 / (4 pi eps0 M), m^3/s^2.
    double coulomb_per_mass() const;
};

/// Dimensionless units for a trap and species. Lengths in l0 =
/// (q^2 / (4 pi eps0 M omega_ref^2))^(1/3), times in 1/omega_ref with
/// omega_ref = omega_z, energies in M omega_ref^2 l0^2.
class UnitSystem {
public:
    UnitSystem(const TrapParams& trap, const IonSpecies& species);

    double length() const { return length_; }
    double time() const { return 1.0 / omega_ref_; }
    double omega_ref() const { return omega_ref_; }
    double energy() const { return energy_; }

    /// (omega_x^2, omega_y^2, omega_z^2) / omega_ref^2.
    const Eigen::Vector3d& spring() const { return spring_; }

    Positions to_dimensionless(const Positions& si) const { return si / length_; }
    Positions to_si(const Positions& dimless) const { return dimless * length_; }

private:
    double omega_ref_;
    double length_;
    double energy_;
    Eigen::Vector3d spring_;
};

struct IonCrystal {
    Positions positions;  // metres, rows in label order (ascending z)
    IonSpecies species;
    /// labels[r] is the row index, in the input the crystal was sorted from,
    /// of the ion now carrying label r.
    std::vector<std::size_t> labels;

    std::size_t size() const { return static_cast<std::size_t>(positions.rows()); }
};

struct PotentialResult {
    double energy = 0.0;
    Positions gradient;
};

/// Harmonic-plus-Coulomb energy (J) and gradient (N) for SI positions.
PotentialResult potential_and_gradient(const Positions& positions, const TrapParams& trap,
                                       const IonSpecies& species);

namespace dimensionless {

/// U = sum_i (1/2) sum_a spring_a r_ia^2 + sum_{i<j} 1/|r_i - r_j|.
PotentialResult potential_and_gradient(const Positions& r, const Eigen::Vector3d& spring);

/// Gradient only; also returns the closest pair distance through `min_distance`.
void gradient(const Positions& r, const Eigen::Vector3d& spring, Positions& grad,
              double* min_distance = nullptr);

/// Full 3N x 3N Hessian, index 3*i + axis.
Eigen::MatrixXd hessian(const Positions& r, const Eigen::Vector3d& spring);

double max_force(const Positions& grad);

}  // namespace dimensionless

struct EquilibriumOptions {
    double tol_force = 1e-10;       // dimensionless, max per-ion force magnitude
    double coarse_tol = 1e-4;       // hand-off from damped descent to Newton
    std::size_t max_descent_steps = 200000;
    std::size_t max_newton_iterations = 60;
    std::size_t max_restarts = 3;
    double jitter = 0.01;           // l0
    std::size_t max_ions = 4000;
};

/// Equilibrium crystal of n ions. Rows of the result are sorted by z (see
/// sort_by_z). Throws ConvergenceError carrying the best residual when the
/// solver stalls and CapacityError when n exceeds options.max_ions.
IonCrystal solve_equilibrium(const TrapParams& trap, const IonSpecies& species, std::size_t n,
                             const std::optional<Positions>& init, std::uint64_t seed,
                             const EquilibriumOptions& options = {});

/// Reorder rows to ascending z; ties broken by ascending x, then y.
IonCrystal sort_by_z(const IonCrystal& crystal);

/// Max per-ion force magnitude, dimensionless.
double equilibrium_residual(const IonCrystal& crystal, const TrapParams& trap);

/// Mean over ions of the distance to the nearest other ion (m).
double mean_nearest_neighbor_spacing(const Positions& positions);

}  // namespace ionsim
