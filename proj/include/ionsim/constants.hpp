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

#include <numbers>

namespace ionsim::constants {

// CODATA 2018 exact / recommended values, SI.
inline constexpr double kElementaryCharge = 1.602176634e-19;
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kCoulombConstant = 1.0 / (4.0 * std::numbers::pi * kVacuumPermittivity);

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace ionsim::constants
