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

#include "ionsim/annealing.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "ionsim/constants.hpp"
#include "ionsim/errors.hpp"
#include "ionsim/random.hpp"

namespace ionsim {

void AnnealParams::validate() const {
    if (n_sweep < 1) throw InvalidArgument("n_sweep must be at least 1");
    if (!(beta0 > 0.0) || !(beta1 >= beta0)) throw InvalidArgument("need beta1 >= beta0 > 0");
    if (m_repeats < 1) throw InvalidArgument("m_repeats must be at least 1");
    if (!(energy_scale > 0.0)) throw InvalidArgument("energy_scale must be positive");
}

double AnnealParams::beta_at(std::size_t sweep) const {
    if (n_sweep == 1) return beta0;
    return beta0 + (beta1 - beta0) * static_cast<double>(sweep) / static_cast<double>(n_sweep - 1);
}

double AnnealParams::coupling_factor() const {
    // rad/s -> rad/ms, and for the cycles convention divide out the 2pi
    const double per_ms = 1e-3;
    return energy_scale * per_ms / (convention == BetaConvention::kCycles ? constants::kTwoPi : 1.0);
}

double classical_energy(const Eigen::MatrixXd& J, const std::vector<int>& spins) {
    double e = 0.0;
    const auto n = J.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j) e -= J(i, j) * spins[static_cast<std::size_t>(i)] * spins[static_cast<std::size_t>(j)];
        }
    }
    return e;
}

AnnealResult anneal_once(const IsingCoupling& coupling, const AnnealParams& params, std::uint64_t seed) {
    params.validate();
    const auto n = static_cast<Eigen::Index>(coupling.size());
    if (n == 0) throw InvalidArgument("coupling has no spins");
    const Eigen::MatrixXd& J = coupling.J;
    const double tol = 1e-12 * std::max(1.0, J.cwiseAbs().maxCoeff());
    if ((J - J.transpose()).cwiseAbs().maxCoeff() > tol) throw InvalidArgument("annealing needs a symmetric J");
    const double factor = params.coupling_factor();

    Rng rng(seed);
    std::vector<int> s(static_cast<std::size_t>(n));
    for (auto& v : s) v = (rng() >> 63) ? -1 : 1;

    // local[i] = sum_j J_ij s_j; flipping i changes E by 4 s_i local[i]
    Eigen::VectorXd local = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j) local[i] += J(i, j) * s[static_cast<std::size_t>(j)];
        }
    }

    for (std::size_t w = 0; w < params.n_sweep; ++w) {
        const double beta = params.beta_at(w) * factor;
        for (Eigen::Index attempt = 0; attempt < n; ++attempt) {
            const auto i = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
            const int si = s[static_cast<std::size_t>(i)];
            const double delta = 4.0 * si * local[i];
            if (delta > 0.0 && !metropolis_accept(beta * delta, uniform01(rng))) continue;
            s[static_cast<std::size_t>(i)] = -si;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j != i) local[j] -= 2.0 * J(j, i) * si;
            }
        }
    }
    AnnealResult r;
    r.energy = classical_energy(J, s);
    r.spins = std::move(s);
    return r;
}

Bitstring spins_to_bits(const std::vector<int>& spins) {
    Bitstring b(spins.size());
    for (std::size_t i = 0; i < spins.size(); ++i) b.set(i, spins[i] < 0);
    return b;
}

AnnealEnsemble anneal_ensemble(const IsingCoupling& coupling, const AnnealParams& params, std::size_t workers) {
    params.validate();
    const std::size_t m = params.m_repeats;
    std::vector<AnnealResult> runs(m);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;

    auto work = [&] {
        for (std::size_t r = next++; r < m; r = next++) {
            try {
                runs[r] = anneal_once(coupling, params, derive_seed(params.seed, r));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_lock);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    workers = std::clamp<std::size_t>(workers, 1, m);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    AnnealEnsemble out;
    out.samples.n = coupling.size();
    out.samples.seed = params.seed;
    out.samples.source = "anneal";
    for (auto& r : runs) {
        out.samples.samples.push_back(spins_to_bits(r.spins));
        out.energies.push_back(r.energy);
    }
    out.covariance = covariance(out.samples, true);
    return out;
}

}  // namespace ionsim
