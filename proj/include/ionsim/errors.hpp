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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ionsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied an argument outside the documented domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Numerical failures: the CLI maps every subclass to exit code 3.
class NumericError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public NumericError {
public:
    ConvergenceError(const std::string& what, double best_residual)
        : NumericError(what + " (best residual " + std::to_string(best_residual) + ")"),
          best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

/// Two ions at (numerically) the same location.
class SingularityError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Transverse Hessian with a negative eigenvalue.
class UnstableCrystalError : public NumericError {
public:
    UnstableCrystalError(const std::string& what, std::size_t mode_index)
        : NumericError(what), mode_index_(mode_index) {}
    std::size_t mode_index() const noexcept { return mode_index_; }

private:
    std::size_t mode_index_;
};

/// A drive tone inside the guard band of a phonon mode.
class ResonanceError : public NumericError {
public:
    ResonanceError(const std::string& what, std::size_t mode_index)
        : NumericError(what), mode_index_(mode_index) {}
    std::size_t mode_index() const noexcept { return mode_index_; }

private:
    std::size_t mode_index_;
};

class IntegratorError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Estimator undefined for the given inputs (e.g. blue sideband not above red).
class EstimationError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Malformed input file or run configuration.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Run configuration rejected; the message starts with the offending key path.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ionsim
