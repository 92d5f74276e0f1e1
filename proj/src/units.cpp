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

#include <cmath>

#include "ionsim/constants.hpp"
#include "ionsim/crystal.hpp"
#include "ionsim/errors.hpp"

namespace ionsim {

TrapParams TrapParams::from_hz(double fx, double fy, double fz) {
    using constants::kTwoPi;
    return {kTwoPi * fx, kTwoPi * fy, kTwoPi * fz};
}

void TrapParams::validate() const {
    if (!(omega_x > 0.0) || !(omega_y > 0.0) || !(omega_z > 0.0)) {
        throw InvalidArgument("trap frequencies must be strictly positive");
    }
}

IonSpecies IonSpecies::yb171() {
    return {"Yb171", 170.9363258 * constants::kAtomicMassUnit, constants::kElementaryCharge};
}

void IonSpecies::validate() const {
    if (!(mass > 0.0)) throw InvalidArgument("ion mass must be positive");
    if (charge == 0.0 || !std::isfinite(charge)) throw InvalidArgument("ion charge must be non-zero");
}

double IonSpecies::coulomb_per_mass() const {
    return constants::kCoulombConstant * charge * charge / mass;
}

UnitSystem::UnitSystem(const TrapParams& trap, const IonSpecies& species) {
    trap.validate();
    species.validate();
    omega_ref_ = trap.omega_z;
    length_ = std::cbrt(species.coulomb_per_mass() / (omega_ref_ * omega_ref_));
    energy_ = species.mass * omega_ref_ * omega_ref_ * length_ * length_;
    const double w2 = omega_ref_ * omega_ref_;
    spring_ = Eigen::Vector3d(trap.omega_x * trap.omega_x / w2, trap.omega_y * trap.omega_y / w2,
                              trap.omega_z * trap.omega_z / w2);
}

}  // namespace ionsim
