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
#include <optional>
#include <string>
#include <vector>

#include "ionsim/analysis.hpp"
#include "ionsim/bitstring.hpp"
#include "ionsim/ising.hpp"

namespace ionsim {

/// B(t) = B0 exp(-t / tau) over [0, T].
struct RampSchedule {
    double B0 = 0.0;   // rad/s
    double tau = 0.0;  // s
    double T = 0.0;    // s

    double field(double t) const;
    void validate() const;
    /// Non-fatal advice, e.g. when T < 5 tau.
    std::vector<std::string> warnings() const;
};

/// Transverse field: a constant, or a ramp when `ramp` is set.
struct FieldProfile {
    double constant = 0.0;
    std::optional<RampSchedule> ramp;

    static FieldProfile fixed(double b) { return {b, std::nullopt}; }
    static FieldProfile ramped(const RampSchedule& r) { return {0.0, r}; }
    double at(double t) const { return ramp ? ramp->field(t) : constant; }
};

/// Dense state over 2^n basis states. Bit i of the index is qubit i and a
/// clear bit is the +1 eigenstate of sigma_z.
struct SpinState {
    std::size_t n = 0;
    Eigen::VectorXcd amplitudes;

    static SpinState basis(std::size_t n, std::uint64_t index);
    static SpinState all_plus(std::size_t n);
};

/// Symmetric state over |j = n/2, m>, index k holding m = n/2 - k.
struct DickeState {
    std::size_t n = 0;
    Eigen::VectorXcd amplitudes;

    static DickeState polarized(std::size_t n);  // m = n/2
};

inline constexpr std::size_t kMaxExactSpins = 14;

struct ExactOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    double max_step_fraction = 0.0;  // when > 0, max step = fraction * interval length
};

/// i d(psi)/dt = H(t) psi with H = sum_{i!=j} J_ij Z_i Z_j + sum_i h_i Z_i + B(t) sum_i X_i.
/// Returns the state at every time in `t_grid` (non-decreasing; evolution
/// starts from `initial` at t_grid[0]).
std::vector<SpinState> evolve_exact(const IsingCoupling& coupling, const FieldProfile& field,
                                    const std::vector<double>& t_grid, const SpinState& initial,
                                    const ExactOptions& options = {});

/// |+>^n evolved under the ramp over [0, T]; returns the final state.
SpinState quasi_adiabatic_ground(const IsingCoupling& coupling, const RampSchedule& schedule,
                                 const ExactOptions& options = {});

/// Polarized Dicke state under H = 4 J0/(n-1) Jz^2 + 2 B0 Jx, exact via
/// eigendecomposition of the (n+1)-dimensional Hamiltonian.
std::vector<DickeState> evolve_dicke(double j0, double b0, std::size_t n, const std::vector<double>& t_grid);

struct SpinObservables {
    double C1 = 0.0;  // sum_i <Z_i> / n
    double C2 = 0.0;  // sum_{ij} <Z_i Z_j> / n^2, diagonal included
};

SpinObservables observables(const SpinState& state);
SpinObservables observables(const DickeState& state);

/// Connected correlations <Z_i Z_j> - <Z_i><Z_j>, diagonal zeroed.
CovarianceMatrix correlations(const SpinState& state);

/// <H> for the time-independent Hamiltonian with field b.
double energy(const IsingCoupling& coupling, double b, const SpinState& state);

struct Trajectory {
    std::vector<double> t;
    std::vector<double> C1, C2;
    std::vector<double> bar_C1, bar_C2;  // trapezoid running averages from t[0]
};

Trajectory make_trajectory(const std::vector<double>& t_grid, const std::vector<SpinObservables>& obs);

/// Running trapezoid average (1/(t - t0)) int_{t0}^{t} y; equals y[0] at t0.
std::vector<double> running_average(const std::vector<double>& t, const std::vector<double>& y);

/// Independent draws in the sigma_z basis.
SampleSet sample_bitstrings(const SpinState& state, std::size_t m, std::uint64_t seed);
/// Draw k with probability |c_k|^2, then a uniformly random string with k ones.
SampleSet sample_bitstrings(const DickeState& state, std::size_t m, std::uint64_t seed);

/// Uniform time grid with `points` samples over [0, T].
std::vector<double> uniform_grid(double T, std::size_t points);

namespace io {
/// CSV "t_s,C1,C2,bar_C1,bar_C2".
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
}  // namespace io

}  // namespace ionsim
