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

#include "ionsim/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "ionsim/constants.hpp"
#include "ionsim/errors.hpp"
#include "ionsim/hungarian.hpp"
#include "ionsim/table_io.hpp"

namespace ionsim {
namespace {

constexpr double kMinPairDistance = 0.01;  // l0

void check_shapes(const Positions& a, const Positions& b) {
    if (a.rows() != b.rows()) throw InvalidArgument("configurations differ in ion count");
}

// Kuhn augmenting paths on the bipartite graph {(i, j) : cost(i, j) <= limit}.
bool has_perfect_matching(const Eigen::MatrixXd& cost, double limit) {
    const auto n = static_cast<std::size_t>(cost.rows());
    std::vector<std::size_t> owner(n, n);
    std::vector<char> seen(n);
    std::function<bool(std::size_t)> augment = [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (seen[j] || cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > limit) continue;
            seen[j] = 1;
            if (owner[j] == n || augment(owner[j])) {
                owner[j] = i;
                return true;
            }
        }
        return false;
    };
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(seen.begin(), seen.end(), 0);
        if (!augment(i)) return false;
    }
    return true;
}

}  // namespace

GasSpecies GasSpecies::hydrogen(double temperature_k) {
    GasSpecies g;
    g.temperature = temperature_k;
    return g;
}

void GasSpecies::validate() const {
    if (!(mass > 0.0)) throw InvalidArgument("gas mass must be positive");
    if (!(temperature >= 0.0)) throw InvalidArgument("gas temperature must be non-negative");
}

void CollisionConfig::validate(const TrapParams& trap) const {
    if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be non-negative");
    if (!(t_evolve > 0.0)) throw InvalidArgument("t_evolve must be positive");
    if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
    const double limit = 0.02 * constants::kTwoPi / trap.omega_y;
    if (dt > limit) {
        std::ostringstream os;
        os << "dt = " << dt << " s exceeds 0.02 of the transverse period (" << limit << " s)";
        throw InvalidArgument(os.str());
    }
    if (n_trials == 0) throw InvalidArgument("n_trials must be at least 1");
}

Eigen::Vector3d sample_gas_velocity(const GasSpecies& gas, Rng& rng) {
    gas.validate();
    const double sigma = std::sqrt(constants::kBoltzmann * gas.temperature / gas.mass);
    Eigen::Vector3d v;
    for (int a = 0; a < 3; ++a) v[a] = sigma * standard_normal(rng);
    return v;
}

Eigen::Vector3d sample_gas_velocity(const GasSpecies& gas, std::uint64_t seed) {
    Rng rng(seed);
    return sample_gas_velocity(gas, rng);
}

Eigen::Vector3d collision_kick(const Eigen::Vector3d& v_gas, double ion_mass, double gas_mass) {
    if (!(ion_mass > 0.0) || !(gas_mass > 0.0)) throw InvalidArgument("masses must be positive");
    return 2.0 * v_gas / (1.0 + ion_mass / gas_mass);
}

MdState damped_md(const Positions& positions, const Positions& velocities, const TrapParams& trap,
                  const IonSpecies& species, double gamma, double t_evolve, double dt, const MdObserver& observer) {
    check_shapes(positions, velocities);
    if (!(t_evolve >= 0.0) || !(dt > 0.0) || !(gamma >= 0.0)) throw InvalidArgument("bad MD time parameters");
    const UnitSystem units(trap, species);
    const Eigen::Vector3d& spring = units.spring();
    const double speed_unit = units.length() * units.omega_ref();

    Positions r = units.to_dimensionless(positions);
    Positions v = velocities / speed_unit;
    const auto steps = static_cast<std::size_t>(std::ceil(t_evolve / dt - 1e-9));
    const double h = steps ? t_evolve / static_cast<double>(steps) * units.omega_ref() : 0.0;
    const double g = gamma * units.time();
    const double damp = 1.0 / (1.0 + 0.5 * g * h);

    auto emit = [&](std::size_t step) {
        if (observer.stride && observer.callback && step % observer.stride == 0) {
            observer.callback(static_cast<double>(step) * h * units.time(), {units.to_si(r), v * speed_unit});
        }
    };

    Positions grad(r.rows(), 3);
    double closest = 0.0;
    dimensionless::gradient(r, spring, grad, &closest);
    emit(0);
    for (std::size_t step = 1; step <= steps; ++step) {
        v += 0.5 * h * (-grad - g * v);
        r += h * v;
        dimensionless::gradient(r, spring, grad, &closest);
        if (r.rows() > 1 && closest < kMinPairDistance) {
            std::ostringstream os;
            os << "ion pair closer than 0.01 l0 at t = " << static_cast<double>(step) * h * units.time() << " s";
            throw IntegratorError(os.str());
        }
        v = (v - 0.5 * h * grad) * damp;
        if (!r.allFinite() || !v.allFinite()) throw IntegratorError("MD state became non-finite");
        emit(step);
    }
    return {units.to_si(r), v * speed_unit};
}

double mechanical_energy(const MdState& state, const TrapParams& trap, const IonSpecies& species) {
    const auto pot = potential_and_gradient(state.positions, trap, species);
    return pot.energy + 0.5 * species.mass * state.velocities.squaredNorm();
}

double max_deviation(const Positions& final_positions, const Positions& reference) {
    check_shapes(final_positions, reference);
    if (final_positions.rows() == 0) return 0.0;
    return (final_positions - reference).rowwise().norm().maxCoeff();
}

MatchedDeviation matched_deviation(const Positions& final_positions, const Positions& reference) {
    check_shapes(final_positions, reference);
    const Eigen::Index n = final_positions.rows();
    MatchedDeviation out;
    if (n == 0) return out;
    Eigen::MatrixXd cost(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = (reference.row(j) - final_positions.row(i)).squaredNorm();
    }

    // Smallest achievable max cost: binary search over the distinct entries,
    // bounded above by the identity relabeling.
    std::vector<double> levels(cost.data(), cost.data() + cost.size());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    std::size_t lo = 0;
    std::size_t hi = static_cast<std::size_t>(
        std::lower_bound(levels.begin(), levels.end(), cost.diagonal().maxCoeff()) - levels.begin());
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (has_perfect_matching(cost, levels[mid])) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    const double bottleneck = levels[lo];

    // Among relabelings within the bottleneck, minimize the summed squares.
    // Any assignment using a barred entry costs more than any admissible one.
    const double barred = static_cast<double>(n) * bottleneck + 1.0;
    const Eigen::MatrixXd restricted = (cost.array() <= bottleneck).select(cost, barred);
    out.permutation = solve_assignment(restricted);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto j = static_cast<Eigen::Index>(out.permutation[static_cast<std::size_t>(i)]);
        out.deviation = std::max(out.deviation, std::sqrt(cost(i, j)));
    }
    return out;
}

CollisionReport run_collision_trials(const IonCrystal& crystal, const TrapParams& trap, const GasSpecies& gas,
                                     const CollisionConfig& config, std::uint64_t seed, std::size_t workers) {
    gas.validate();
    config.validate(trap);
    const std::size_t n = crystal.size();
    if (n == 0) throw InvalidArgument("crystal is empty");

    CollisionReport report;
    report.thresholds = config.thresholds;
    report.trials.resize(config.n_trials);
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t t = next++; t < config.n_trials; t = next++) {
            TrialRecord& rec = report.trials[t];
            rec.trial = t;
            Rng rng = make_stream(seed, t);
            const Eigen::Vector3d v_gas = sample_gas_velocity(gas, rng);
            rec.gas_speed = v_gas.norm();
            rec.kicked_ion = static_cast<std::size_t>(uniform_index(rng, n));
            Positions v0 = Positions::Zero(static_cast<Eigen::Index>(n), 3);
            v0.row(static_cast<Eigen::Index>(rec.kicked_ion)) =
                collision_kick(v_gas, crystal.species.mass, gas.mass).transpose();
            try {
                const MdState end =
                    damped_md(crystal.positions, v0, trap, crystal.species, config.gamma, config.t_evolve, config.dt);
                rec.max_dev = max_deviation(end.positions, crystal.positions);
                rec.matched_dev = matched_deviation(end.positions, crystal.positions).deviation;
            } catch (const NumericError& e) {
                rec.failed = true;
                rec.error = e.what();
            }
        }
    };
    workers = std::clamp<std::size_t>(workers, 1, config.n_trials);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    std::size_t ok = 0;
    report.raw_exceedance.assign(config.thresholds.size(), 0.0);
    report.matched_exceedance.assign(config.thresholds.size(), 0.0);
    for (const auto& rec : report.trials) {
        if (rec.failed) {
            ++report.failures;
            continue;
        }
        ++ok;
        for (std::size_t k = 0; k < config.thresholds.size(); ++k) {
            if (rec.max_dev > config.thresholds[k]) report.raw_exceedance[k] += 1.0;
            if (rec.matched_dev > config.thresholds[k]) report.matched_exceedance[k] += 1.0;
        }
    }
    if (ok) {
        for (auto& f : report.raw_exceedance) f /= static_cast<double>(ok);
        for (auto& f : report.matched_exceedance) f /= static_cast<double>(ok);
    }
    return report;
}

namespace io {

void write_trials_csv(const std::filesystem::path& path, const CollisionReport& report) {
    std::string text = "trial,kicked_ion,gas_speed,max_dev_um,matched_dev_um,failed\n";
    for (const auto& r : report.trials) {
        text += std::to_string(r.trial) + ',' + std::to_string(r.kicked_ion) + ',' + format_double(r.gas_speed) + ',' +
                format_double(r.max_dev * 1e6) + ',' + format_double(r.matched_dev * 1e6) + ',' +
                (r.failed ? "1" : "0") + '\n';
    }
    write_text(path, text);
}

nlohmann::json collision_summary(const CollisionReport& report, const GasSpecies& gas, const CollisionConfig& config) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < report.thresholds.size(); ++k) {
        rows.push_back({{"threshold_um", report.thresholds[k] * 1e6},
                        {"raw_fraction", report.raw_exceedance[k]},
                        {"matched_fraction", report.matched_exceedance[k]}});
    }
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& r : report.trials) {
        if (r.failed) failures.push_back({{"trial", r.trial}, {"error", r.error}});
    }
    return {{"trials", report.trials.size()},
            {"failures", report.failures},
            {"failed_trials", failures},
            {"gas_temperature_k", gas.temperature},
            {"gas_mass_kg", gas.mass},
            {"gamma_per_s", config.gamma},
            {"t_evolve_s", config.t_evolve},
            {"dt_s", config.dt},
            {"exceedance", rows}};
}

}  // namespace io

}  // namespace ionsim
