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

#include "ionsim/crystal.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "ionsim/errors.hpp"
#include "ionsim/random.hpp"

namespace ionsim {
namespace {

constexpr double kCoincident = 1e-9;

// Gradient plus a Gershgorin bound on the largest Hessian eigenvalue.
double gradient_with_stiffness(const Positions& r, const Eigen::Vector3d& spring, Positions& grad) {
    const Eigen::Index n = r.rows();
    grad.resize(n, 3);
    std::vector<double> inv_r3_sum(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        grad.row(i) = r.row(i).cwiseProduct(spring.transpose());
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Eigen::RowVector3d d = r.row(i) - r.row(j);
            const double r2 = d.squaredNorm();
            const double inv_r = 1.0 / std::sqrt(r2);
            const double inv_r3 = inv_r * inv_r * inv_r;
            grad.row(i) -= inv_r3 * d;
            grad.row(j) += inv_r3 * d;
            inv_r3_sum[static_cast<std::size_t>(i)] += inv_r3;
            inv_r3_sum[static_cast<std::size_t>(j)] += inv_r3;
        }
    }
    const double worst = n > 0 ? *std::max_element(inv_r3_sum.begin(), inv_r3_sum.end()) : 0.0;
    return spring.maxCoeff() + 4.0 * worst;
}

double min_pair_distance(const Positions& r) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < r.rows(); ++j) {
            best = std::min(best, (r.row(i) - r.row(j)).norm());
        }
    }
    return best;
}

void check_not_coincident(const Positions& r) {
    if (r.rows() > 1 && min_pair_distance(r) < kCoincident) {
        throw SingularityError("two ions are coincident");
    }
}

// Triangular-lattice patch in the plane of the two weakest trap axes, taking
// the n sites closest to the origin in a metric stretched by the trap aspect.
Positions lattice_guess(std::size_t n, const Eigen::Vector3d& spring) {
    std::array<int, 3> axes{0, 1, 2};
    std::sort(axes.begin(), axes.end(), [&](int a, int b) { return spring[a] < spring[b]; });
    const int long_axis = axes[0];
    const int short_axis = axes[1];
    const double w_long = std::sqrt(spring[long_axis]);
    const double w_short = std::sqrt(spring[short_axis]);
    const double aspect = w_short / w_long;
    const int range = static_cast<int>(std::ceil(2.0 * std::sqrt(static_cast<double>(n) * aspect))) + 2;

    struct Site {
        double u, v, metric;
    };
    std::vector<Site> sites;
    sites.reserve(static_cast<std::size_t>((2 * range + 1) * (2 * range + 1)));
    const double row_height = std::sqrt(3.0) / 2.0;
    for (int j = -range; j <= range; ++j) {
        for (int i = -range; i <= range; ++i) {
            const double u = i + 0.5 * (std::abs(j) % 2);
            const double v = j * row_height;
            const double m = (u * w_long) * (u * w_long) + (v * w_short) * (v * w_short);
            sites.push_back({u, v, m});
        }
    }
    std::stable_sort(sites.begin(), sites.end(),
                     [](const Site& a, const Site& b) { return a.metric < b.metric; });

    Positions r = Positions::Zero(static_cast<Eigen::Index>(n), 3);
    for (std::size_t k = 0; k < n; ++k) {
        r(static_cast<Eigen::Index>(k), long_axis) = sites[k].u;
        r(static_cast<Eigen::Index>(k), short_axis) = sites[k].v;
    }
    r.rowwise() -= r.colwise().mean();
    return r;
}

// Rescale r by the factor minimizing U(s r) = s^2 T + C / s.
void rescale_to_virial(Positions& r, const Eigen::Vector3d& spring) {
    double trap = 0.0;
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        trap += 0.5 * r.row(i).cwiseAbs2().dot(spring.transpose());
    }
    double coulomb = 0.0;
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < r.rows(); ++j) coulomb += 1.0 / (r.row(i) - r.row(j)).norm();
    }
    if (trap > 0.0 && coulomb > 0.0) r *= std::cbrt(coulomb / (2.0 * trap));
}

// FIRE: inertial descent with adaptive damping.
double damped_descent(Positions& r, const Eigen::Vector3d& spring, double tol, std::size_t max_steps) {
    constexpr double kFInc = 1.1, kFDec = 0.5, kAlpha0 = 0.1, kFAlpha = 0.99;
    constexpr std::size_t kNMin = 5;

    Positions grad;
    double stiffness = gradient_with_stiffness(r, spring, grad);
    double dt_max = 0.25 / std::sqrt(stiffness);
    double dt = 0.1 * dt_max;
    double alpha = kAlpha0;
    std::size_t positive_steps = 0;
    Positions v = Positions::Zero(r.rows(), 3);
    double residual = dimensionless::max_force(grad);

    for (std::size_t step = 0; step < max_steps && residual > tol; ++step) {
        const Positions force = -grad;
        const double power = (force.array() * v.array()).sum();
        if (power > 0.0) {
            const double vn = v.norm();
            const double fn = force.norm();
            if (fn > 0.0) v = (1.0 - alpha) * v + (alpha * vn / fn) * force;
            if (positive_steps > kNMin) {
                dt = std::min(dt * kFInc, dt_max);
                alpha *= kFAlpha;
            }
            ++positive_steps;
        } else {
            v.setZero();
            dt *= kFDec;
            alpha = kAlpha0;
            positive_steps = 0;
        }
        v += dt * force;
        r += dt * v;
        stiffness = gradient_with_stiffness(r, spring, grad);
        dt_max = 0.25 / std::sqrt(stiffness);
        dt = std::min(dt, dt_max);
        residual = dimensionless::max_force(grad);
        if (!std::isfinite(residual)) break;
    }
    return residual;
}

struct NewtonOutcome {
    double residual;
    bool positive_definite;
};

NewtonOutcome newton_polish(Positions& r, const Eigen::Vector3d& spring, double tol,
                            std::size_t max_iterations) {
    Positions grad;
    dimensionless::gradient(r, spring, grad);
    double residual = dimensionless::max_force(grad);
    bool pd = false;
    const Eigen::Index dim = 3 * r.rows();

    for (std::size_t it = 0; it < max_iterations; ++it) {
        Eigen::MatrixXd h = dimensionless::hessian(r, spring);
        Eigen::LLT<Eigen::MatrixXd> llt(h);
        pd = llt.info() == Eigen::Success;
        if (residual <= tol) break;
        double shift = 0.0;
        const double scale = h.diagonal().cwiseAbs().maxCoeff();
        while (llt.info() != Eigen::Success) {
            shift = shift == 0.0 ? 1e-8 * scale : shift * 10.0;
            llt.compute(h + shift * Eigen::MatrixXd::Identity(dim, dim));
        }
        const Eigen::Map<const Eigen::VectorXd> g(grad.data(), dim);
        const Eigen::VectorXd step = -llt.solve(g);

        // Accept on a smaller max force, or on sufficient energy decrease
        // (the max-norm is not monotone along a descent direction).
        const double energy = dimensionless::potential_and_gradient(r, spring).energy;
        const double slope = g.dot(step);
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            Positions trial = r;
            Eigen::Map<Eigen::VectorXd>(trial.data(), dim) += t * step;
            double dmin = 0.0;
            Positions trial_grad;
            dimensionless::gradient(trial, spring, trial_grad, &dmin);
            if (dmin > kCoincident) {
                const double trial_residual = dimensionless::max_force(trial_grad);
                const double trial_energy = dimensionless::potential_and_gradient(trial, spring).energy;
                if (trial_residual < residual || trial_energy < energy + 1e-4 * t * slope) {
                    r = std::move(trial);
                    grad = std::move(trial_grad);
                    residual = trial_residual;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) break;
    }
    if (residual <= tol) {
        Eigen::LLT<Eigen::MatrixXd> llt(dimensionless::hessian(r, spring));
        pd = llt.info() == Eigen::Success;
    }
    return {residual, pd};
}

}  // namespace

namespace dimensionless {

void gradient(const Positions& r, const Eigen::Vector3d& spring, Positions& grad, double* min_distance) {
    const Eigen::Index n = r.rows();
    grad.resize(n, 3);
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) grad.row(i) = r.row(i).cwiseProduct(spring.transpose());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Eigen::RowVector3d d = r.row(i) - r.row(j);
            const double dist = d.norm();
            dmin = std::min(dmin, dist);
            const double inv_r3 = 1.0 / (dist * dist * dist);
            grad.row(i) -= inv_r3 * d;
            grad.row(j) += inv_r3 * d;
        }
    }
    if (min_distance) *min_distance = dmin;
}

PotentialResult potential_and_gradient(const Positions& r, const Eigen::Vector3d& spring) {
    check_not_coincident(r);
    PotentialResult out;
    double dmin = 0.0;
    gradient(r, spring, out.gradient, &dmin);
    double energy = 0.0;
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        energy += 0.5 * r.row(i).cwiseAbs2().dot(spring.transpose());
        for (Eigen::Index j = i + 1; j < r.rows(); ++j) energy += 1.0 / (r.row(i) - r.row(j)).norm();
    }
    out.energy = energy;
    return out;
}

Eigen::MatrixXd hessian(const Positions& r, const Eigen::Vector3d& spring) {
    const Eigen::Index n = r.rows();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int a = 0; a < 3; ++a) h(3 * i + a, 3 * i + a) = spring[a];
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Eigen::Vector3d d = (r.row(i) - r.row(j)).transpose();
            const double r2 = d.squaredNorm();
            const double inv_r5 = 1.0 / (r2 * r2 * std::sqrt(r2));
            const Eigen::Matrix3d block = (3.0 * d * d.transpose() - r2 * Eigen::Matrix3d::Identity()) * inv_r5;
            h.block<3, 3>(3 * i, 3 * i) += block;
            h.block<3, 3>(3 * j, 3 * j) += block;
            h.block<3, 3>(3 * i, 3 * j) -= block;
            h.block<3, 3>(3 * j, 3 * i) -= block;
        }
    }
    return h;
}

double max_force(const Positions& grad) {
    return grad.rows() == 0 ? 0.0 : grad.rowwise().norm().maxCoeff();
}

}  // namespace dimensionless

PotentialResult potential_and_gradient(const Positions& positions, const TrapParams& trap,
                                       const IonSpecies& species) {
    const UnitSystem units(trap, species);
    PotentialResult dimless = dimensionless::potential_and_gradient(units.to_dimensionless(positions), units.spring());
    dimless.energy *= units.energy();
    dimless.gradient *= units.energy() / units.length();
    return dimless;
}

IonCrystal solve_equilibrium(const TrapParams& trap, const IonSpecies& species, std::size_t n,
                             const std::optional<Positions>& init, std::uint64_t seed,
                             const EquilibriumOptions& options) {
    if (n == 0) throw InvalidArgument("ion count must be at least 1");
    if (n > options.max_ions) {
        throw CapacityError("ion count " + std::to_string(n) + " exceeds solver capacity " +
                            std::to_string(options.max_ions));
    }
    const UnitSystem units(trap, species);
    const Eigen::Vector3d& spring = units.spring();

    Positions r;
    if (init) {
        if (static_cast<std::size_t>(init->rows()) != n) {
            throw InvalidArgument("initial positions must have shape n x 3");
        }
        r = units.to_dimensionless(*init);
        check_not_coincident(r);
    } else {
        r = lattice_guess(n, spring);
        rescale_to_virial(r, spring);
    }
    Rng rng(seed);
    if (!init) {
        for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] += options.jitter * standard_normal(rng);
    }

    double best = std::numeric_limits<double>::infinity();
    if (n > 1) {
        for (std::size_t attempt = 0; attempt <= options.max_restarts; ++attempt) {
            damped_descent(r, spring, options.coarse_tol, options.max_descent_steps);
            const NewtonOutcome outcome = newton_polish(r, spring, options.tol_force, options.max_newton_iterations);
            best = std::min(best, outcome.residual);
            if (outcome.residual <= options.tol_force && outcome.positive_definite) break;
            if (attempt == options.max_restarts) {
                throw ConvergenceError("equilibrium solver did not converge", best);
            }
            // Stalled or sitting on a saddle: kick and relax again.
            for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] += options.jitter * standard_normal(rng);
        }
    } else {
        r.setZero();
    }

    IonCrystal raw{units.to_si(r), species, {}};
    raw.labels.resize(n);
    std::iota(raw.labels.begin(), raw.labels.end(), std::size_t{0});
    return sort_by_z(raw);
}

IonCrystal sort_by_z(const IonCrystal& crystal) {
    const std::size_t n = crystal.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const Positions& p = crystal.positions;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
        if (p(ia, 2) != p(ib, 2)) return p(ia, 2) < p(ib, 2);
        if (p(ia, 0) != p(ib, 0)) return p(ia, 0) < p(ib, 0);
        return p(ia, 1) < p(ib, 1);
    });
    IonCrystal out{Positions(static_cast<Eigen::Index>(n), 3), crystal.species, order};
    for (std::size_t k = 0; k < n; ++k) {
        out.positions.row(static_cast<Eigen::Index>(k)) = p.row(static_cast<Eigen::Index>(order[k]));
    }
    return out;
}

double equilibrium_residual(const IonCrystal& crystal, const TrapParams& trap) {
    const UnitSystem units(trap, crystal.species);
    Positions grad;
    dimensionless::gradient(units.to_dimensionless(crystal.positions), units.spring(), grad);
    return dimensionless::max_force(grad);
}

double mean_nearest_neighbor_spacing(const Positions& positions) {
    const Eigen::Index n = positions.rows();
    if (n < 2) return 0.0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) best = std::min(best, (positions.row(i) - positions.row(j)).norm());
        }
        total += best;
    }
    return total / static_cast<double>(n);
}

}  // namespace ionsim
