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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "ionsim/analysis.hpp"
#include "ionsim/bitstring.hpp"
#include "ionsim/ising.hpp"

namespace ionsim {

/// How an inverse temperature quoted in 1/kHz multiplies J (stored in rad/s).
enum class BetaConvention {
    kCycles,   // beta * J / 2pi, J read as an ordinary frequency in kHz (default)
    kAngular,  // beta * J, J read as an angular frequency in rad/ms
};

struct AnnealParams {
    std::size_t n_sweep = 100;
    double beta0 = 0.01;  // 1/kHz
    double beta1 = 1.0;   // 1/kHz
    std::size_t m_repeats = 100;
    std::uint64_t seed = 0;
    BetaConvention convention = BetaConvention::kCycles;
    double energy_scale = 1.0;  // extra factor on J, for overall scalings absorbed into beta

    void validate() const;
    /// Linear schedule beta0 + (beta1 - beta0) * w / (n_sweep - 1), in 1/kHz.
    double beta_at(std::size_t sweep) const;
    /// Factor turning J in rad/s into the units that beta multiplies.
    double coupling_factor() const;
};

/// Metropolis rule min(1, exp(-beta dE)) against a uniform draw u in [0, 1).
inline bool metropolis_accept(double beta_delta_e, double u) {
    return beta_delta_e <= 0.0 || u < std::exp(-beta_delta_e);
}

/// E(s) = -sum_{i != j} J_ij s_i s_j in rad/s; the longitudinal field is ignored.
double classical_energy(const Eigen::MatrixXd& J, const std::vector<int>& spins);

struct AnnealResult {
    std::vector<int> spins;  // +1 / -1
    double energy = 0.0;     // rad/s
};

/// One annealing run from a uniformly random start: n_sweep sweeps of N
/// random single-spin Metropolis attempts.
AnnealResult anneal_once(const IsingCoupling& coupling, const AnnealParams& params, std::uint64_t seed);

struct AnnealEnsemble {
    SampleSet samples;  // bit i set when s_i = -1
    std::vector<double> energies;
    CovarianceMatrix covariance;  // with <Z_i> taken as zero
};

/// m_repeats independent runs; repeat r uses derive_seed(params.seed, r), so
/// the output does not depend on `workers`.
AnnealEnsemble anneal_ensemble(const IsingCoupling& coupling, const AnnealParams& params, std::size_t workers = 1);

Bitstring spins_to_bits(const std::vector<int>& spins);

}  // namespace ionsim
