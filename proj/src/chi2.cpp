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
#include <limits>
#include <numeric>
#include <string>

#include "ionsim/analysis.hpp"
#include "ionsim/errors.hpp"

namespace ionsim {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

double log_prefactor(double a, double x) { return -x + a * std::log(x) - std::lgamma(a); }

// Series sum such that P(a, x) = exp(log_prefactor) * sum.
double lower_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) return sum;
    }
    throw NumericError("incomplete gamma series did not converge");
}

// Continued fraction (modified Lentz) such that Q(a, x) = exp(log_prefactor) * cf.
double upper_fraction(double a, double x) {
    constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) return h;
    }
    throw NumericError("incomplete gamma continued fraction did not converge");
}

void check_args(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) throw InvalidArgument("incomplete gamma needs a > 0 and x >= 0");
}

}  // namespace

double gamma_q(double a, double x) {
    check_args(a, x);
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - std::exp(log_prefactor(a, x)) * lower_series(a, x);
    return std::exp(log_prefactor(a, x)) * upper_fraction(a, x);
}

double log_gamma_q(double a, double x) {
    check_args(a, x);
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return std::log1p(-std::exp(log_prefactor(a, x)) * lower_series(a, x));
    return log_prefactor(a, x) + std::log(upper_fraction(a, x));
}

double chi2_upper_tail(double x, double dof) { return gamma_q(0.5 * dof, 0.5 * x); }

double log_chi2_upper_tail(double x, double dof) { return log_gamma_q(0.5 * dof, 0.5 * x); }

Chi2Result chi2_test(std::span<const double> observed, std::span<const double> expected_probs, double m_total) {
    if (observed.size() != expected_probs.size()) throw InvalidArgument("observed and expected differ in length");
    if (observed.size() < 2) throw InvalidArgument("chi-square test needs at least two bins");
    const double total = std::accumulate(expected_probs.begin(), expected_probs.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("expected probabilities must sum to 1");

    Chi2Result r;
    for (std::size_t b = 0; b < observed.size(); ++b) {
        const double expected = m_total * expected_probs[b];
        if (!(expected > 0.0)) throw InvalidArgument("bin " + std::to_string(b) + " has zero expected count");
        if (expected < 1.0) {
            r.warnings.push_back("bin " + std::to_string(b) + " expected count below 1");
        } else if (expected < 5.0) {
            r.warnings.push_back("bin " + std::to_string(b) + " expected count below 5");
        }
        const double diff = observed[b] - expected;
        r.chi2 += diff * diff / expected;
    }
    r.dof = observed.size() - 1;
    const double ln_p = log_chi2_upper_tail(r.chi2, static_cast<double>(r.dof));
    r.log10_p = ln_p / std::log(10.0);
    r.p_value = r.log10_p < -300.0 ? 0.0 : std::exp(ln_p);
    return r;
}

}  // namespace ionsim
