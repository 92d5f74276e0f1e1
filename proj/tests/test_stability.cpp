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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <utility>
#include <vector>

#include "ionsim/constants.hpp"
#include "ionsim/crystal.hpp"
#include "ionsim/errors.hpp"
#include "ionsim/hungarian.hpp"
#include "ionsim/random.hpp"
#include "ionsim/stability.hpp"
#include "oracles.hpp"

using namespace ionsim;

namespace {

const TrapParams kTrap = TrapParams::from_hz(600e3, 2164e3, 144e3);

Positions single_ion_at_y(double y) {
    Positions p = Positions::Zero(1, 3);
    p(0, 1) = y;
    return p;
}

// Envelope of a damped single-ion oscillation along y.
double envelope(const MdState& s, double w, double g) {
    const double wd = std::sqrt(w * w - 0.25 * g * g);
    const double y = s.positions(0, 1), v = s.velocities(0, 1);
    return std::hypot(y, (v + 0.5 * g * y) / wd);
}

}  // namespace

TEST(GasVelocity, MaxwellBoltzmannMoments) {
    const GasSpecies gas = GasSpecies::hydrogen(300.0);
    Rng rng(1);
    const int m = 100000;
    double speed = 0.0;
    Eigen::Vector3d sq = Eigen::Vector3d::Zero();
    for (int k = 0; k < m; ++k) {
        const Eigen::Vector3d v = sample_gas_velocity(gas, rng);
        speed += v.norm();
        sq += v.cwiseProduct(v);
    }
    speed /= m;
    sq /= m;
    const double kt_m = constants::kBoltzmann * 300.0 / gas.mass;
    EXPECT_NEAR(speed, std::sqrt(8.0 * kt_m / std::numbers::pi), 0.01 * std::sqrt(8.0 * kt_m / std::numbers::pi));
    // Variance of a sample variance is 2 sigma^4 / m: 5 sigma is about 2.2% here.
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(sq[a], kt_m, 0.025 * kt_m);
}

TEST(GasVelocity, ColdLimitAndValidation) {
    const Eigen::Vector3d v = sample_gas_velocity(GasSpecies::hydrogen(1e-12), 5);
    EXPECT_LT(v.norm(), 1e-3);
    EXPECT_THROW(sample_gas_velocity(GasSpecies::hydrogen(-1.0), 5), InvalidArgument);
    EXPECT_EQ(sample_gas_velocity(GasSpecies::hydrogen(6.1), 9), sample_gas_velocity(GasSpecies::hydrogen(6.1), 9));
}

TEST(CollisionKick, Formula) {
    const Eigen::Vector3d v(3.0, -4.0, 12.0);
    EXPECT_EQ(collision_kick(Eigen::Vector3d::Zero(), 2.0, 1.0), Eigen::Vector3d::Zero());
    EXPECT_LT((collision_kick(v, 5.0, 5.0) - v).norm(), 1e-15);
    const double ion = IonSpecies::yb171().mass, h2 = GasSpecies{}.mass;
    const Eigen::Vector3d k = collision_kick(v, ion, h2);
    EXPECT_NEAR(k.norm(), v.norm() * 2.0 / (1.0 + ion / h2), 1e-14);
    EXPECT_NEAR(k.normalized().dot(v.normalized()), 1.0, 1e-15);
    EXPECT_NEAR(v.norm() / k.norm(), 0.5 * (1.0 + ion / h2), 1e-12);
}

TEST(CollisionConfig, StepLimit) {
    CollisionConfig c;
    EXPECT_NO_THROW(c.validate(kTrap));
    c.dt = 0.021 * 2.0 * std::numbers::pi / kTrap.omega_y;
    EXPECT_THROW(c.validate(kTrap), InvalidArgument);
    c = CollisionConfig{};
    c.t_evolve = 0.0;
    EXPECT_THROW(c.validate(kTrap), InvalidArgument);
}

TEST(DampedMd, EquilibriumIsStationary) {
    const IonCrystal c = solve_equilibrium(kTrap, IonSpecies::yb171(), 12, std::nullopt, 3);
    const MdState s = damped_md(c.positions, Positions::Zero(12, 3), kTrap, c.species, 8e3, 20e-6, 1e-9);
    const double l0 = UnitSystem(kTrap, c.species).length();
    EXPECT_LT((s.positions - c.positions).cwiseAbs().maxCoeff(), 1e-10 * l0);
}

TEST(DampedMd, UndampedHarmonicAmplitude) {
    const double a = 1e-6;
    const double w = kTrap.omega_y;
    const double period = 2.0 * std::numbers::pi / w;
    double peak = 0.0;
    MdObserver obs{1, [&](double t, const MdState& s) {
                       if (t > 99.0 * period) peak = std::max(peak, std::abs(s.positions(0, 1)));
                   }};
    const MdState s = damped_md(single_ion_at_y(a), Positions::Zero(1, 3), kTrap, IonSpecies::yb171(), 0.0,
                                100.0 * period, 1e-10, obs);
    EXPECT_NEAR(peak / a, 1.0, 1e-6);
    EXPECT_NEAR(s.positions(0, 0), 0.0, 1e-20);
}

TEST(DampedMd, EnvelopeDecaysAtHalfGamma) {
    const double g = 8e3, w = kTrap.omega_y, a = 1e-6;
    std::vector<std::pair<double, double>> samples;
    MdObserver obs{5000, [&](double t, const MdState& s) { samples.emplace_back(t, envelope(s, w, g)); }};
    damped_md(single_ion_at_y(a), Positions::Zero(1, 3), kTrap, IonSpecies::yb171(), g, 5.0 / g, 1e-9, obs);
    ASSERT_GT(samples.size(), 100u);
    const double a0 = a * std::hypot(1.0, 0.5 * g / std::sqrt(w * w - 0.25 * g * g));
    for (const auto& [t, env] : samples) EXPECT_NEAR(env / (a0 * std::exp(-0.5 * g * t)), 1.0, 0.01) << "t=" << t;
}

TEST(DampedMd, SecondOrderConvergence) {
    const double g = 8e3, w = kTrap.omega_y, a = 1e-6, t = 20e-6;
    auto error = [&](double dt) {
        const MdState s = damped_md(single_ion_at_y(a), Positions::Zero(1, 3), kTrap, IonSpecies::yb171(), g, t, dt);
        return std::abs(s.positions(0, 1) - oracle::damped_oscillator(a, w, g, t));
    };
    const double e1 = error(2e-9), e2 = error(1e-9), e3 = error(0.5e-9);
    EXPECT_NEAR(e1 / e2, 4.0, 0.4);
    EXPECT_NEAR(e2 / e3, 4.0, 0.4);
}

TEST(DampedMd, EnergyNeverIncreasesWithDamping) {
    const IonCrystal c = solve_equilibrium(kTrap, IonSpecies::yb171(), 16, std::nullopt, 2);
    Positions v = Positions::Zero(16, 3);
    v.row(5) = Eigen::RowVector3d(3.0, -2.0, 4.0);
    double last = std::numeric_limits<double>::infinity();
    std::size_t checks = 0;
    const std::size_t stride = 2000;
    MdObserver obs{stride, [&](double, const MdState& s) {
                       const double e = mechanical_energy(s, kTrap, c.species);
                       EXPECT_LE(e, last + 1e-9 * stride * std::abs(e));
                       last = e;
                       ++checks;
                   }};
    damped_md(c.positions, v, kTrap, c.species, 8e3, 200e-6, 1e-9, obs);
    EXPECT_GT(checks, 50u);
}

TEST(DampedMd, NearCollisionRaises) {
    const IonCrystal c = solve_equilibrium(kTrap, IonSpecies::yb171(), 2, std::nullopt, 1);
    Positions v = Positions::Zero(2, 3);
    v(0, 2) = 300.0;
    v(1, 2) = -300.0;
    EXPECT_THROW(damped_md(c.positions, v, kTrap, c.species, 0.0, 1e-6, 1e-10), IntegratorError);
}

TEST(Deviation, RawMeasure) {
    const IonCrystal c = solve_equilibrium(kTrap, IonSpecies::yb171(), 6, std::nullopt, 1);
    EXPECT_EQ(max_deviation(c.positions, c.positions), 0.0);
    Positions moved = c.positions;
    moved(2, 1) += 1e-6;
    EXPECT_NEAR(max_deviation(moved, c.positions), 1e-6, 1e-18);
    Positions swapped = c.positions;
    swapped.row(0).swap(swapped.row(1));
    EXPECT_GE(max_deviation(swapped, c.positions), (c.positions.row(0) - c.positions.row(1)).norm() - 1e-18);
    EXPECT_THROW(max_deviation(c.positions.topRows(5), c.positions), InvalidArgument);
}

TEST(Deviation, MatchedMeasureUndoesRelabeling) {
    const IonCrystal c = solve_equilibrium(kTrap, IonSpecies::yb171(), 7, std::nullopt, 1);
    const MatchedDeviation same = matched_deviation(c.positions, c.positions);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(same.permutation[i], i);
    EXPECT_EQ(same.deviation, 0.0);
    Positions swapped = c.positions;
    swapped.row(2).swap(swapped.row(5));
    const MatchedDeviation m = matched_deviation(swapped, c.positions);
    EXPECT_EQ(m.permutation[2], 5u);
    EXPECT_EQ(m.permutation[5], 2u);
    EXPECT_EQ(m.deviation, 0.0);
    EXPECT_THROW(matched_deviation(c.positions.topRows(3), c.positions), InvalidArgument);
}

// Brute force: minimize the max squared displacement, then the sum.
std::pair<double, double> lexicographic_optimum(const Positions& fin, const Positions& ref) {
    std::vector<std::size_t> perm(static_cast<std::size_t>(fin.rows()));
    std::iota(perm.begin(), perm.end(), 0);
    std::pair<double, double> best{1e300, 1e300};
    do {
        double worst = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            const double d = (ref.row(static_cast<Eigen::Index>(perm[i])) - fin.row(static_cast<Eigen::Index>(i))).squaredNorm();
            worst = std::max(worst, d);
            sum += d;
        }
        best = std::min(best, std::make_pair(worst, sum));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

TEST(Deviation, MatchedMinimizesMaxBeforeSum) {
    // The least-squares relabeling here has max sqrt(13), above the identity's sqrt(10).
    Positions ref(3, 3), fin(3, 3);
    ref << 3, 4, 0, 0, 3, 0, 1, 3, 0;
    fin << 3, 1, 0, 2, 4, 0, 2, 0, 0;
    const MatchedDeviation m = matched_deviation(fin, ref);
    EXPECT_LE(m.deviation, max_deviation(fin, ref));
    EXPECT_DOUBLE_EQ(m.deviation * m.deviation, lexicographic_optimum(fin, ref).first);
}

TEST(Deviation, MatchedAgainstEnumeration) {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(uniform_index(rng, 6));
        Positions ref(n, 3), fin(n, 3);
        for (Eigen::Index i = 0; i < n; ++i)
            for (int a = 0; a < 3; ++a) {
                ref(i, a) = uniform01(rng);
                fin(i, a) = uniform01(rng);
            }
        const MatchedDeviation m = matched_deviation(fin, ref);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            sum += (ref.row(static_cast<Eigen::Index>(m.permutation[static_cast<std::size_t>(i)])) - fin.row(i)).squaredNorm();
        const auto best = lexicographic_optimum(fin, ref);
        EXPECT_DOUBLE_EQ(m.deviation * m.deviation, best.first);
        EXPECT_NEAR(sum, best.second, 1e-12);
        EXPECT_LE(m.deviation, max_deviation(fin, ref));
    }
}

TEST(Hungarian, FourPointKnownOptimum) {
    Eigen::MatrixXd cost(4, 4);
    cost << 9, 2, 7, 8, 6, 4, 3, 7, 5, 8, 1, 8, 7, 6, 9, 4;
    double best = 0.0;
    const auto brute = oracle::brute_assignment(cost, &best);
    const auto got = solve_assignment(cost);
    EXPECT_EQ(got, brute);
    EXPECT_DOUBLE_EQ(best, 13.0);
}

TEST(Hungarian, RandomAgainstEnumeration) {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(uniform_index(rng, 7));
        Eigen::MatrixXd cost(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = uniform01(rng) * 10.0 - 3.0;
        double best = 0.0;
        oracle::brute_assignment(cost, &best);
        const auto got = solve_assignment(cost);
        double value = 0.0;
        std::vector<bool> used(static_cast<std::size_t>(n), false);
        for (Eigen::Index i = 0; i < n; ++i) {
            ASSERT_FALSE(used[got[static_cast<std::size_t>(i)]]);
            used[got[static_cast<std::size_t>(i)]] = true;
            value += cost(i, static_cast<Eigen::Index>(got[static_cast<std::size_t>(i)]));
        }
        EXPECT_NEAR(value, best, 1e-12);
    }
    EXPECT_THROW(solve_assignment(Eigen::MatrixXd::Zero(2, 3)), InvalidArgument);
}

TEST(CollisionTrials, ColdGasLeavesCrystalInPlace) {
    const IonCrystal c = solve_equilibrium(kTrap, IonSpecies::yb171(), 10, std::nullopt, 1);
    CollisionConfig cfg;
    cfg.n_trials = 4;
    cfg.t_evolve = 50e-6;
    cfg.dt = 2e-9;
    const CollisionReport r = run_collision_trials(c, kTrap, GasSpecies::hydrogen(1e-12), cfg, 1);
    for (const auto& t : r.trials) {
        EXPECT_FALSE(t.failed);
        EXPECT_LT(t.max_dev, 1e-9);
    }
    EXPECT_EQ(r.raw_exceedance, (std::vector<double>{0.0, 0.0}));
}

TEST(CollisionTrials, MatchedNeverExceedsRawAndWorkersAgree) {
    const IonCrystal c = solve_equilibrium(kTrap, IonSpecies::yb171(), 12, std::nullopt, 1);
    CollisionConfig cfg;
    cfg.n_trials = 6;
    cfg.t_evolve = 100e-6;
    cfg.dt = 2e-9;
    const CollisionReport a = run_collision_trials(c, kTrap, GasSpecies::hydrogen(300.0), cfg, 17, 1);
    const CollisionReport b = run_collision_trials(c, kTrap, GasSpecies::hydrogen(300.0), cfg, 17, 3);
    ASSERT_EQ(a.trials.size(), 6u);
    for (std::size_t k = 0; k < 6; ++k) {
        EXPECT_LE(a.trials[k].matched_dev, a.trials[k].max_dev);
        EXPECT_EQ(a.trials[k].max_dev, b.trials[k].max_dev);
        EXPECT_EQ(a.trials[k].kicked_ion, b.trials[k].kicked_ion);
        EXPECT_LT(a.trials[k].kicked_ion, 12u);
    }
    EXPECT_EQ(a.raw_exceedance, b.raw_exceedance);
}
