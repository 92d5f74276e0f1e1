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
#include <span>
#include <string>
#include <vector>

namespace ionsim {

/// Weak sideband pulse on mode k.
struct SidebandDrive {
    double duration = 0.0;       // T, s
    Eigen::VectorXd rabi;        // carrier Rabi rate per ion, rad/s; one entry means uniform
    double eta = 0.0;            // Lamb-Dicke factor of the mode
    Eigen::VectorXd mode_vector; // b_ik

    /// sum_i (T eta b_ik Omega_i)^2
    double excitation_strength() const;
};

struct ExcitationProbabilities {
    double red = 0.0;   // nbar * S
    double blue = 0.0;  // (nbar + 1) * S
    std::vector<std::string> warnings;
};

/// Single-excitation probabilities; warns when the blue probability exceeds 0.5
/// or eta * mean(Omega) * T exceeds pi/2.
ExcitationProbabilities excitation_probabilities(double nbar, const SidebandDrive& drive);

/// nbar = P_r / (P_b - P_r). Throws EstimationError unless P_b > P_r >= 0.
double estimate_nbar(double p_red, double p_blue);

/// Expected or measured camera counts.
struct PhotonCounts {
    double n_max = 0.0;  // all ions bright
    double red = 0.0;
    double blue = 0.0;
};

/// nbar = (N_max - N_r) / (N_r - N_b). Throws EstimationError unless
/// N_r > N_b and N_max >= N_r.
double estimate_nbar_counts(const PhotonCounts& counts);

/// Noise-free counts for dark counts `dark` and per-ion bright counts.
PhotonCounts expected_counts(double nbar, const SidebandDrive& drive, const Eigen::VectorXd& bright, double dark);

struct NbarEstimate {
    double nbar = 0.0;
    double sigma = 0.0;  // first-order Poisson propagation
};

/// Estimate with error bar, treating each count as Poisson (variance = count):
/// with a = N_max - N_r, b = N_r - N_b,
/// sigma^2 = N_max / b^2 + N_r (a + b)^2 / b^4 + N_b a^2 / b^4.
NbarEstimate estimate_with_error(const PhotonCounts& counts);

struct ScanPoint {
    double detuning = 0.0;  // units of the scan file; the CLI reads kHz
    PhotonCounts counts;
};

/// Sum numerators and denominators over several scan points before the ratio.
PhotonCounts pool_counts(std::span<const ScanPoint> points);

struct ModeNbar {
    double detuning = 0.0;     // requested mode position
    std::size_t first = 0;     // pooled scan rows [first, first + count)
    std::size_t count = 0;
    NbarEstimate estimate;
    bool defined = true;
    std::string error;
};

/// For each mode detuning, pool `window` scan points centred on the nearest
/// scan row (clipped at the ends) and estimate nbar. With no modes given,
/// every row is estimated on its own.
std::vector<ModeNbar> estimate_scan(const std::vector<ScanPoint>& scan, const std::vector<double>& mode_detunings,
                                    std::size_t window = 3);

namespace io {
/// CSV with header "detuning,red_counts,blue_counts,n_max".
std::vector<ScanPoint> read_scan_csv(const std::filesystem::path& path);
/// CSV "detuning,first_row,rows,nbar,sigma,error".
void write_mode_nbar_csv(const std::filesystem::path& path, const std::vector<ModeNbar>& rows);
}  // namespace io

}  // namespace ionsim
