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

#include "ionsim/spindyn.hpp"

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include "ionsim/errors.hpp"
#include "ionsim/random.hpp"
#include "ionsim/table_io.hpp"

namespace ionsim {
namespace {

using cplx = std::complex<double>;
using StateVec = std::vector<cplx>;
namespace odeint = boost::numeric::odeint;

void check_grid(const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw InvalidArgument("time grid is empty");
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        if (!(t_grid[k] >= t_grid[k - 1])) throw InvalidArgument("time grid must be non-decreasing");
    }
}

// Diagonal of sum_{i!=j} J_ij Z_i Z_j + sum_i h_i Z_i in the computational basis.
std::vector<double> diagonal_energy(const IsingCoupling& c) {
    const std::size_t n = c.size();
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> e(dim, 0.0);
    std::vector<double> s(n);
    for (std::size_t x = 0; x < dim; ++x) {
        for (std::size_t i = 0; i < n; ++i) s[i] = (x >> i) & 1u ? -1.0 : 1.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            acc += c.h[ii] * s[i];
            for (std::size_t j = i + 1; j < n; ++j) acc += 2.0 * c.J(ii, static_cast<Eigen::Index>(j)) * s[i] * s[j];
        }
        e[x] = acc;
    }
    return e;
}

struct SpinRhs {
    const std::vector<double>* diag;
    const FieldProfile* field;
    std::size_t n;

    void operator()(const StateVec& psi, StateVec& dpsi, double t) const {
        const double b = field->at(t);
        const std::size_t dim = psi.size();
        const auto& e = *diag;
        for (std::size_t x = 0; x < dim; ++x) {
            cplx flip = 0.0;
            for (std::size_t i = 0; i < n; ++i) flip += psi[x ^ (std::size_t{1} << i)];
            const cplx hpsi = e[x] * psi[x] + b * flip;
            dpsi[x] = cplx(hpsi.imag(), -hpsi.real());  // -i * hpsi
        }
    }
};

double norm_of(const StateVec& v) {
    double s = 0.0;
    for (const auto& a : v) s += std::norm(a);
    return std::sqrt(s);
}

SpinState to_state(std::size_t n, const StateVec& v) {
    SpinState s{n, Eigen::VectorXcd(static_cast<Eigen::Index>(v.size()))};
    for (std::size_t k = 0; k < v.size(); ++k) s.amplitudes[static_cast<Eigen::Index>(k)] = v[k];
    return s;
}

}  // namespace

double RampSchedule::field(double t) const { return B0 * std::exp(-t / tau); }

void RampSchedule::validate() const {
    if (!(B0 > 0.0)) throw InvalidArgument("ramp B0 must be positive");
    if (!(tau > 0.0)) throw InvalidArgument("ramp tau must be positive");
    if (!(T > 0.0)) throw InvalidArgument("ramp duration must be positive");
}

std::vector<std::string> RampSchedule::warnings() const {
    std::vector<std::string> w;
    if (T < 5.0 * tau) w.push_back("ramp duration is shorter than 5 tau; the final field is not small");
    return w;
}

SpinState SpinState::basis(std::size_t n, std::uint64_t index) {
    if (n > kMaxExactSpins) throw CapacityError("exact engine is limited to 14 spins");
    const std::size_t dim = std::size_t{1} << n;
    if (index >= dim) throw InvalidArgument("basis index out of range");
    SpinState s{n, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim))};
    s.amplitudes[static_cast<Eigen::Index>(index)] = 1.0;
    return s;
}

SpinState SpinState::all_plus(std::size_t n) {
    if (n > kMaxExactSpins) throw CapacityError("exact engine is limited to 14 spins");
    const std::size_t dim = std::size_t{1} << n;
    return {n, Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(dim), 1.0 / std::sqrt(static_cast<double>(dim)))};
}

DickeState DickeState::polarized(std::size_t n) {
    DickeState s{n, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n + 1))};
    s.amplitudes[0] = 1.0;
    return s;
}

std::vector<SpinState> evolve_exact(const IsingCoupling& coupling, const FieldProfile& field,
                                    const std::vector<double>& t_grid, const SpinState& initial,
                                    const ExactOptions& options) {
    const std::size_t n = coupling.size();
    if (n > kMaxExactSpins) throw CapacityError("exact engine is limited to 14 spins, got " + std::to_string(n));
    if (n == 0) throw InvalidArgument("coupling has no spins");
    if (initial.n != n || initial.amplitudes.size() != (Eigen::Index{1} << n)) {
        throw InvalidArgument("initial state does not match the coupling size");
    }
    if (field.ramp) field.ramp->validate();
    check_grid(t_grid);

    const std::vector<double> diag = diagonal_energy(coupling);
    SpinRhs rhs{&diag, &field, n};
    StateVec psi(initial.amplitudes.data(), initial.amplitudes.data() + initial.amplitudes.size());

    double scale = 0.0;
    for (double e : diag) scale = std::max(scale, std::abs(e));
    scale += static_cast<double>(n) * std::max(std::abs(field.at(t_grid.front())), std::abs(field.constant));
    const double dt0 = 0.01 / std::max(scale, 1e-300);

    auto stepper = odeint::make_controlled(options.abs_tol, options.rel_tol,
                                           odeint::runge_kutta_fehlberg78<StateVec>());
    std::vector<SpinState> out;
    out.reserve(t_grid.size());
    out.push_back(to_state(n, psi));
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double t0 = t_grid[k - 1];
        const double t1 = t_grid[k];
        if (t1 > t0) {
            try {
                odeint::integrate_adaptive(stepper, rhs, psi, t0, t1, std::min(dt0, t1 - t0));
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "exact evolution failed between t=" << t0 << " s and t=" << t1 << " s: " << e.what();
                throw IntegratorError(os.str());
            }
            const double norm = norm_of(psi);
            if (std::abs(norm - 1.0) > 1e-8) {
                std::ostringstream os;
                os << "exact evolution lost normalization at t=" << t1 << " s (norm " << norm << ")";
                throw IntegratorError(os.str());
            }
        }
        out.push_back(to_state(n, psi));
    }
    return out;
}

SpinState quasi_adiabatic_ground(const IsingCoupling& coupling, const RampSchedule& schedule,
                                 const ExactOptions& options) {
    schedule.validate();
    const auto traj = evolve_exact(coupling, FieldProfile::ramped(schedule), {0.0, schedule.T},
                                   SpinState::all_plus(coupling.size()), options);
    return traj.back();
}

std::vector<DickeState> evolve_dicke(double j0, double b0, std::size_t n, const std::vector<double>& t_grid) {
    if (n == 0) throw InvalidArgument("Dicke engine needs at least one spin");
    check_grid(t_grid);
    const auto dim = static_cast<Eigen::Index>(n + 1);
    const double j = 0.5 * static_cast<double>(n);
    const double twist = n > 1 ? 4.0 * j0 / static_cast<double>(n - 1) : 0.0;

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double m = j - static_cast<double>(k);
        h(k, k) = twist * m * m;
        if (k + 1 < dim) {
            // <m-1| Jx |m> = sqrt(j(j+1) - m(m-1)) / 2
            const double jx = 0.5 * std::sqrt(j * (j + 1.0) - m * (m - 1.0));
            h(k, k + 1) = h(k + 1, k) = 2.0 * b0 * jx;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    if (eig.info() != Eigen::Success) throw NumericError("Dicke Hamiltonian diagonalization failed");
    const Eigen::MatrixXd& v = eig.eigenvectors();
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const Eigen::VectorXcd overlap = v.row(0).transpose().cast<cplx>();  // V^T |m = j>

    std::vector<DickeState> out;
    out.reserve(t_grid.size());
    Eigen::VectorXcd phased(dim);
    for (double t : t_grid) {
        const double tau = t - t_grid.front();
        for (Eigen::Index q = 0; q < dim; ++q) phased[q] = std::polar(1.0, -lambda[q] * tau) * overlap[q];
        out.push_back({n, v.cast<cplx>() * phased});
    }
    return out;
}

SpinObservables observables(const SpinState& state) {
    const double n = static_cast<double>(state.n);
    SpinObservables o;
    for (Eigen::Index x = 0; x < state.amplitudes.size(); ++x) {
        const double p = std::norm(state.amplitudes[x]);
        const double mag = n - 2.0 * std::popcount(static_cast<std::uint64_t>(x));
        o.C1 += p * mag;
        o.C2 += p * mag * mag;
    }
    o.C1 /= n;
    o.C2 /= n * n;
    return o;
}

SpinObservables observables(const DickeState& state) {
    const double n = static_cast<double>(state.n);
    const double j = 0.5 * n;
    double jz = 0.0, jz2 = 0.0;
    for (Eigen::Index k = 0; k < state.amplitudes.size(); ++k) {
        const double p = std::norm(state.amplitudes[k]);
        const double m = j - static_cast<double>(k);
        jz += p * m;
        jz2 += p * m * m;
    }
    return {2.0 * jz / n, 4.0 * jz2 / (n * n)};
}

CovarianceMatrix correlations(const SpinState& state) {
    const auto n = static_cast<Eigen::Index>(state.n);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd zz = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd s(n);
    for (Eigen::Index x = 0; x < state.amplitudes.size(); ++x) {
        const double p = std::norm(state.amplitudes[x]);
        if (p == 0.0) continue;
        for (Eigen::Index i = 0; i < n; ++i) s[i] = (x >> i) & 1 ? -1.0 : 1.0;
        z += p * s;
        zz.noalias() += p * s * s.transpose();
    }
    Eigen::MatrixXd c = zz - z * z.transpose();
    c.diagonal().setZero();
    return {std::move(c)};
}

double energy(const IsingCoupling& coupling, double b, const SpinState& state) {
    const auto diag = diagonal_energy(coupling);
    const auto& a = state.amplitudes;
    double e = 0.0;
    for (Eigen::Index x = 0; x < a.size(); ++x) {
        e += diag[static_cast<std::size_t>(x)] * std::norm(a[x]);
        cplx flip = 0.0;
        for (std::size_t i = 0; i < state.n; ++i) flip += a[x ^ (Eigen::Index{1} << i)];
        e += b * (std::conj(a[x]) * flip).real();
    }
    return e;
}

std::vector<double> running_average(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size()) throw InvalidArgument("running average inputs differ in length");
    std::vector<double> out(y.size());
    double integral = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (k > 0) integral += 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
        const double span = t[k] - t.front();
        out[k] = span > 0.0 ? integral / span : y[k];
    }
    return out;
}

Trajectory make_trajectory(const std::vector<double>& t_grid, const std::vector<SpinObservables>& obs) {
    if (t_grid.size() != obs.size()) throw InvalidArgument("trajectory grid and observables differ in length");
    Trajectory tr;
    tr.t = t_grid;
    for (const auto& o : obs) {
        tr.C1.push_back(o.C1);
        tr.C2.push_back(o.C2);
    }
    tr.bar_C1 = running_average(tr.t, tr.C1);
    tr.bar_C2 = running_average(tr.t, tr.C2);
    return tr;
}

SampleSet sample_bitstrings(const SpinState& state, std::size_t m, std::uint64_t seed) {
    const auto& a = state.amplitudes;
    std::vector<double> cdf(static_cast<std::size_t>(a.size()));
    double acc = 0.0;
    for (Eigen::Index x = 0; x < a.size(); ++x) {
        acc += std::norm(a[x]);
        cdf[static_cast<std::size_t>(x)] = acc;
    }
    SampleSet out;
    out.n = state.n;
    out.seed = seed;
    out.source = "exact";
    out.samples.reserve(m);
    Rng rng(seed);
    for (std::size_t r = 0; r < m; ++r) {
        const double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        const auto x = static_cast<std::uint64_t>(it - cdf.begin());
        Bitstring b(state.n);
        for (std::size_t i = 0; i < state.n; ++i) b.set(i, (x >> i) & 1u);
        out.samples.push_back(std::move(b));
    }
    return out;
}

SampleSet sample_bitstrings(const DickeState& state, std::size_t m, std::uint64_t seed) {
    const auto& a = state.amplitudes;
    std::vector<double> cdf(static_cast<std::size_t>(a.size()));
    double acc = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        acc += std::norm(a[k]);
        cdf[static_cast<std::size_t>(k)] = acc;
    }
    SampleSet out;
    out.n = state.n;
    out.seed = seed;
    out.source = "dicke";
    out.samples.reserve(m);
    Rng rng(seed);
    std::vector<std::size_t> sites(state.n);
    for (std::size_t r = 0; r < m; ++r) {
        const double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        const auto k = static_cast<std::size_t>(it - cdf.begin());
        std::iota(sites.begin(), sites.end(), std::size_t{0});
        Bitstring b(state.n);
        for (std::size_t q = 0; q < k; ++q) {
            const std::size_t pick = q + uniform_index(rng, state.n - q);
            std::swap(sites[q], sites[pick]);
            b.set(sites[q], true);
        }
        out.samples.push_back(std::move(b));
    }
    return out;
}

std::vector<double> uniform_grid(double T, std::size_t points) {
    if (points < 2 || !(T > 0.0)) throw InvalidArgument("time grid needs T > 0 and at least two points");
    std::vector<double> t(points);
    for (std::size_t k = 0; k < points; ++k) t[k] = T * static_cast<double>(k) / static_cast<double>(points - 1);
    return t;
}

namespace io {

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::string text = "t_s,C1,C2,bar_C1,bar_C2\n";
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        text += format_double(traj.t[k]) + ',' + format_double(traj.C1[k]) + ',' + format_double(traj.C2[k]) + ',' +
                format_double(traj.bar_C1[k]) + ',' + format_double(traj.bar_C2[k]) + '\n';
    }
    write_text(path, text);
}

}  // namespace io

}  // namespace ionsim
