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

#include "ionsim/phonons.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "ionsim/constants.hpp"
#include "ionsim/errors.hpp"
#include "ionsim/table_io.hpp"

namespace ionsim {

Eigen::MatrixXd transverse_hessian(const IonCrystal& crystal, const TrapParams& trap, double residual_tol) {
    trap.validate();
    const double residual = equilibrium_residual(crystal, trap);
    if (!(residual <= residual_tol)) {
        throw InvalidArgument("crystal is not at equilibrium (residual " + std::to_string(residual) + ")");
    }
    const Eigen::Index n = crystal.positions.rows();
    const double k = crystal.species.coulomb_per_mass();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double r = (crystal.positions.row(i) - crystal.positions.row(j)).norm();
            const double c = k / (r * r * r);
            a(i, j) = c;
            a(j, i) = c;
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = trap.omega_y * trap.omega_y - a.row(i).sum();
    }
    return a;
}

ModeSet solve_modes(const Eigen::MatrixXd& hessian) {
    const Eigen::Index n = hessian.rows();
    if (hessian.cols() != n) throw InvalidArgument("hessian must be square");
    const double scale = hessian.cwiseAbs().maxCoeff();
    if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InvalidArgument("hessian must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian);
    if (eig.info() != Eigen::Success) throw NumericError("eigen-decomposition failed");

    ModeSet modes;
    modes.frequencies.resize(n);
    modes.vectors.resize(n, n);
    modes.lamb_dicke = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = n - 1 - k;
        const double lambda = eig.eigenvalues()[src];
        if (!(lambda > 0.0)) {
            throw UnstableCrystalError("mode " + std::to_string(k) + " has non-positive eigenvalue " +
                                           std::to_string(lambda),
                                       static_cast<std::size_t>(k));
        }
        modes.frequencies[k] = std::sqrt(lambda);
        Eigen::VectorXd v = eig.eigenvectors().col(src);
        const double sum = v.sum();
        double sign = 1.0;
        if (std::abs(sum) > 1e-8) {
            sign = sum > 0.0 ? 1.0 : -1.0;
        } else {
            const double peak = v.cwiseAbs().maxCoeff();
            for (Eigen::Index i = 0; i < n; ++i) {
                if (std::abs(v[i]) >= peak * (1.0 - 1e-12)) {
                    sign = v[i] > 0.0 ? 1.0 : -1.0;
                    break;
                }
            }
        }
        modes.vectors.col(k) = sign * v;
    }
    return modes;
}

double lamb_dicke(double delta_k, const IonSpecies& species, double omega_k) {
    if (!(omega_k > 0.0)) throw InvalidArgument("mode frequency must be positive");
    species.validate();
    return delta_k * std::sqrt(constants::kHbar / (2.0 * species.mass * omega_k));
}

double counter_propagating_delta_k(double wavelength) {
    if (!(wavelength > 0.0)) throw InvalidArgument("wavelength must be positive");
    return 2.0 * constants::kTwoPi / wavelength;
}

void attach_lamb_dicke(ModeSet& modes, double delta_k, const IonSpecies& species) {
    modes.delta_k = delta_k;
    modes.lamb_dicke.resize(modes.frequencies.size());
    for (Eigen::Index k = 0; k < modes.frequencies.size(); ++k) {
        modes.lamb_dicke[k] = lamb_dicke(delta_k, species, modes.frequencies[k]);
    }
}

namespace io {

void write_modes(const std::filesystem::path& table, const std::filesystem::path& vectors, const ModeSet& modes) {
    std::string text = "mode,frequency_hz_offset_from_com,eta\n";
    const double com = modes.size() ? modes.frequencies[0] : 0.0;
    for (Eigen::Index k = 0; k < modes.frequencies.size(); ++k) {
        text += std::to_string(k + 1) + "," + ionsim::io::format_double((com - modes.frequencies[k]) / constants::kTwoPi) +
                "," + ionsim::io::format_double(modes.lamb_dicke[k]) + "\n";
    }
    ionsim::io::write_text(table, text);
    ionsim::io::write_matrix_csv(vectors, modes.vectors);
}

nlohmann::json modes_summary(const ModeSet& modes, std::size_t top) {
    nlohmann::json list = nlohmann::json::array();
    const double com = modes.size() ? modes.frequencies[0] : 0.0;
    for (std::size_t k = 0; k < std::min(top, modes.size()); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        list.push_back({{"mode", k + 1},
                        {"frequency_hz", modes.frequencies[kk] / constants::kTwoPi},
                        {"offset_from_com_hz", (com - modes.frequencies[kk]) / constants::kTwoPi},
                        {"eta", modes.lamb_dicke[kk]}});
    }
    return {{"n", modes.size()}, {"delta_k_per_m", modes.delta_k}, {"modes", list}};
}

}  // namespace io

}  // namespace ionsim
