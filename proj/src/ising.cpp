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

#include "ionsim/ising.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ionsim/errors.hpp"
#include "ionsim/table_io.hpp"

namespace ionsim {
namespace {

std::vector<std::size_t> resolve_modes(const ModeSet& modes, const CouplingOptions& options) {
    if (options.modes.empty()) {
        std::vector<std::size_t> all(modes.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }
    for (std::size_t k : options.modes) {
        if (k >= modes.size()) throw InvalidArgument("mode index " + std::to_string(k) + " out of range");
    }
    return options.modes;
}

void check_tone(const DriveTone& tone, Eigen::Index n) {
    if (tone.omega_eff.size() != 1 && tone.omega_eff.size() != n) {
        throw InvalidArgument("omega_eff must be a scalar or have one entry per ion");
    }
}

void check_guard(const ModeSet& modes, const DriveTone& tone, const std::vector<std::size_t>& subset,
                 double guard_band) {
    for (std::size_t k : subset) {
        const double detuning = tone.mu - modes.frequencies[static_cast<Eigen::Index>(k)];
        if (std::abs(detuning) <= guard_band) {
            throw ResonanceError("tone at mu/2pi = " + std::to_string(tone.mu / constants::kTwoPi) +
                                     " Hz is inside the guard band of mode " + std::to_string(k),
                                 k);
        }
    }
}

IsingCoupling finish(Eigen::MatrixXd J, bool compensate_h) {
    IsingCoupling c;
    c.self_coupling = J.diagonal();
    J.diagonal().setZero();
    c.J = std::move(J);
    c.J0 = kac_strength(c.J);
    c.h = compensate_h ? Eigen::VectorXd::Zero(c.J.rows()) : longitudinal_field(c);
    return c;
}

}  // namespace

DriveTone DriveTone::uniform(double mu, double omega_eff) {
    DriveTone t;
    t.mu = mu;
    t.omega_eff = Eigen::VectorXd::Constant(1, omega_eff);
    return t;
}

std::vector<std::size_t> first_modes(std::size_t count) {
    std::vector<std::size_t> out(count);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
}

IsingCoupling compute_jij(const ModeSet& modes, const std::vector<DriveTone>& tones, const CouplingOptions& options) {
    if (tones.empty()) throw InvalidArgument("at least one drive tone is required");
    const Eigen::Index n = modes.vectors.rows();
    const auto subset = resolve_modes(modes, options);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (const DriveTone& tone : tones) {
        check_tone(tone, n);
        check_guard(modes, tone, subset, options.guard_band);
        // sum_k w_k b_k b_k^T with w_k = eta_k^2 / (mu - omega_k), then scale rows/cols by Omega/4.
        Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t k : subset) {
            const auto kk = static_cast<Eigen::Index>(k);
            const double w = modes.lamb_dicke[kk] * modes.lamb_dicke[kk] / (tone.mu - modes.frequencies[kk]);
            kernel.noalias() += w * modes.vectors.col(kk) * modes.vectors.col(kk).transpose();
        }
        Eigen::VectorXd omega(n);
        for (Eigen::Index i = 0; i < n; ++i) omega[i] = tone.omega_at(i);
        J += (omega.asDiagonal() * kernel * omega.asDiagonal()) / 16.0;
    }
    return finish(std::move(J), options.compensate_h);
}

Eigen::VectorXd longitudinal_field(const IsingCoupling& coupling) {
    Eigen::VectorXd h = coupling.J.rowwise().sum() - coupling.J.diagonal();
    if (coupling.self_coupling.size() == h.size()) h += coupling.self_coupling;
    return 2.0 * h;
}

IsingCoupling single_mode_coupling(const ModeSet& modes, std::size_t k, const DriveTone& tone,
                                   const CouplingOptions& options) {
    if (k >= modes.size()) throw InvalidArgument("mode index " + std::to_string(k) + " out of range");
    const Eigen::Index n = modes.vectors.rows();
    check_tone(tone, n);
    check_guard(modes, tone, {k}, options.guard_band);
    const auto kk = static_cast<Eigen::Index>(k);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = tone.omega_at(i) * modes.lamb_dicke[kk] * modes.vectors(i, kk);
    const double detuning = tone.mu - modes.frequencies[kk];
    return finish(v * v.transpose() / (16.0 * detuning), options.compensate_h);
}

double kac_strength(const Eigen::MatrixXd& J) {
    const double n = static_cast<double>(J.rows());
    return n > 0 ? (J.sum() - J.diagonal().sum()) / n : 0.0;
}

IsingCoupling make_coupling(Eigen::MatrixXd J, bool compensate_h) {
    if (J.rows() != J.cols()) throw InvalidArgument("J must be square");
    const double scale = J.size() ? J.cwiseAbs().maxCoeff() : 0.0;
    if (J.size() && (J - J.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InvalidArgument("J must be symmetric");
    }
    return finish(std::move(J), compensate_h);
}

double omega_eff_for_target_j0(const ModeSet& modes, double mu, double target_j0, const CouplingOptions& options) {
    const IsingCoupling unit = compute_jij(modes, {DriveTone::uniform(mu, 1.0)}, options);
    const double ratio = target_j0 / unit.J0;
    if (!(ratio > 0.0)) throw InvalidArgument("target J0 has the wrong sign for this detuning");
    return std::sqrt(ratio);
}

Dephasing residual_dephasing(double eta, double omega_eff, double delta, std::size_t n) {
    if (delta == 0.0) throw InvalidArgument("detuning must be non-zero");
    const double x = eta * eta * omega_eff * omega_eff / (delta * delta);
    return {std::exp(-2.0 * static_cast<double>(n) * x), std::exp(-2.0 * x)};
}

namespace io {

void write_coupling_csv(const std::filesystem::path& path, const IsingCoupling& coupling) {
    Eigen::MatrixXd out = coupling.J;
    if (coupling.self_coupling.size() == out.rows()) out.diagonal() = coupling.self_coupling;
    ionsim::io::write_matrix_csv(path, out);
}

nlohmann::json coupling_header(const IsingCoupling& coupling, const std::vector<DriveTone>& tones) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& t : tones) {
        nlohmann::json omega;
        if (t.omega_eff.size() == 1) {
            omega = t.omega_eff[0] / constants::kTwoPi;
        } else {
            omega = nlohmann::json::array();
            for (Eigen::Index i = 0; i < t.omega_eff.size(); ++i) omega.push_back(t.omega_eff[i] / constants::kTwoPi);
        }
        list.push_back({{"mu_hz", t.mu / constants::kTwoPi}, {"omega_eff_hz", omega}});
    }
    return {{"n", coupling.size()}, {"J0_hz", coupling.J0 / constants::kTwoPi}, {"tones", list}};
}

IsingCoupling read_coupling_csv(const std::filesystem::path& path, bool compensate_h) {
    return make_coupling(ionsim::io::read_matrix_csv(path), compensate_h);
}

}  // namespace io

}  // namespace ionsim
