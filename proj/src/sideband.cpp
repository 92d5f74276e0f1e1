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

#include "ionsim/sideband.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ionsim/errors.hpp"
#include "ionsim/table_io.hpp"

namespace ionsim {

double SidebandDrive::excitation_strength() const {
    if (rabi.size() != 1 && rabi.size() != mode_vector.size()) {
        throw InvalidArgument("Rabi rates must be uniform or one per ion");
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < mode_vector.size(); ++i) {
        const double a = duration * eta * mode_vector[i] * (rabi.size() == 1 ? rabi[0] : rabi[i]);
        s += a * a;
    }
    return s;
}

ExcitationProbabilities excitation_probabilities(double nbar, const SidebandDrive& drive) {
    if (!(nbar >= 0.0)) throw InvalidArgument("nbar must be non-negative");
    const double s = drive.excitation_strength();
    ExcitationProbabilities p;
    p.red = nbar * s;
    p.blue = (nbar + 1.0) * s;
    if (p.blue > 0.5) p.warnings.push_back("blue-sideband probability above 0.5; weak-excitation model is unreliable");
    if (drive.rabi.size() > 0 && drive.eta * std::abs(drive.rabi.mean()) * drive.duration > std::numbers::pi / 2) {
        p.warnings.push_back("eta * Omega * T exceeds pi/2");
    }
    return p;
}

double estimate_nbar(double p_red, double p_blue) {
    if (!(p_red >= 0.0) || !(p_blue > p_red)) {
        throw EstimationError("sideband estimate needs P_b > P_r >= 0");
    }
    return p_red / (p_blue - p_red);
}

double estimate_nbar_counts(const PhotonCounts& c) {
    if (!(c.red > c.blue)) throw EstimationError("sideband estimate needs red counts above blue counts");
    if (!(c.n_max >= c.red)) throw EstimationError("sideband estimate needs N_max >= red counts");
    return (c.n_max - c.red) / (c.red - c.blue);
}

PhotonCounts expected_counts(double nbar, const SidebandDrive& drive, const Eigen::VectorXd& bright, double dark) {
    if (bright.size() != drive.mode_vector.size()) throw InvalidArgument("bright counts must be given per ion");
    PhotonCounts c{dark, dark, dark};
    for (Eigen::Index i = 0; i < bright.size(); ++i) {
        const double a = drive.duration * drive.eta * drive.mode_vector[i] *
                         (drive.rabi.size() == 1 ? drive.rabi[0] : drive.rabi[i]);
        const double s = a * a;
        c.n_max += bright[i];
        c.red += (1.0 - nbar * s) * bright[i];
        c.blue += (1.0 - (nbar + 1.0) * s) * bright[i];
    }
    return c;
}

NbarEstimate estimate_with_error(const PhotonCounts& c) {
    NbarEstimate e;
    e.nbar = estimate_nbar_counts(c);
    const double a = c.n_max - c.red;
    const double b = c.red - c.blue;
    const double b2 = b * b;
    const double var = c.n_max / b2 + c.red * (a + b) * (a + b) / (b2 * b2) + c.blue * a * a / (b2 * b2);
    e.sigma = std::sqrt(var);
    return e;
}

PhotonCounts pool_counts(std::span<const ScanPoint> points) {
    PhotonCounts sum;
    for (const auto& p : points) {
        sum.n_max += p.counts.n_max;
        sum.red += p.counts.red;
        sum.blue += p.counts.blue;
    }
    return sum;
}

std::vector<ModeNbar> estimate_scan(const std::vector<ScanPoint>& scan, const std::vector<double>& mode_detunings,
                                    std::size_t window) {
    if (scan.empty()) throw InvalidArgument("sideband scan is empty");
    if (window == 0) throw InvalidArgument("pooling window must be at least 1");
    std::vector<ModeNbar> out;
    auto run = [&](double detuning, std::size_t first, std::size_t count) {
        ModeNbar row;
        row.detuning = detuning;
        row.first = first;
        row.count = count;
        try {
            row.estimate = estimate_with_error(pool_counts(std::span(scan).subspan(first, count)));
        } catch (const EstimationError& e) {
            row.defined = false;
            row.error = e.what();
        }
        out.push_back(row);
    };
    if (mode_detunings.empty()) {
        for (std::size_t k = 0; k < scan.size(); ++k) run(scan[k].detuning, k, 1);
        return out;
    }
    const std::size_t w = std::min(window, scan.size());
    for (double target : mode_detunings) {
        std::size_t nearest = 0;
        for (std::size_t k = 1; k < scan.size(); ++k) {
            if (std::abs(scan[k].detuning - target) < std::abs(scan[nearest].detuning - target)) nearest = k;
        }
        std::size_t first = nearest >= w / 2 ? nearest - w / 2 : 0;
        first = std::min(first, scan.size() - w);
        run(target, first, w);
    }
    return out;
}

namespace io {

std::vector<ScanPoint> read_scan_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line)) throw FormatError("sideband scan is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"detuning", "red_counts", "blue_counts", "n_max"};
    if (header != expected) throw FormatError("sideband scan header must be detuning,red_counts,blue_counts,n_max");
    std::vector<ScanPoint> out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cols = split_csv_line(line);
        if (cols.size() != 4) throw FormatError("sideband scan rows need four columns");
        ScanPoint p;
        p.detuning = parse_double(cols[0]);
        p.counts.red = parse_double(cols[1]);
        p.counts.blue = parse_double(cols[2]);
        p.counts.n_max = parse_double(cols[3]);
        out.push_back(p);
    }
    return out;
}

void write_mode_nbar_csv(const std::filesystem::path& path, const std::vector<ModeNbar>& rows) {
    std::string text = "detuning,first_row,rows,nbar,sigma,error\n";
    for (const auto& r : rows) {
        text += format_double(r.detuning) + ',' + std::to_string(r.first) + ',' + std::to_string(r.count) + ',';
        if (r.defined) {
            text += format_double(r.estimate.nbar) + ',' + format_double(r.estimate.sigma) + ",\n";
        } else {
            text += ",," + r.error + '\n';
        }
    }
    write_text(path, text);
}

}  // namespace io

}  // namespace ionsim
