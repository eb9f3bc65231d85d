// Copyright 2026 The qrev Authors
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

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace qrev::analysis {

/// Every closed-form figure of merit at one measurement strength.
struct TradeoffPoint {
    double eta = 0.0;
    double c = 1.0;
    double p_error = 0.5;
    double fidelity = 1.0;
    double d_rel = 0.0;  // 1 - 2 p_error
    double d_rev = 1.0;  // 2 F - 1
    double theta = 0.0;  // d_rel = sin(theta), d_rev = cos(theta)
    double fine_expectation = 0.5;
};

/// Closed forms for a single observer. c0 in (0, 1], eta in [0, 1].
TradeoffPoint tradeoff_point(double c0, double eta);

/// Bob's expected fine 1 - F + P_error = 1 - (d_rev + d_rel) / 2.
double fine_expectation(double c0, double eta);

struct OptimalStrength {
    double eta_star = 1.0;
    double fine_min = 0.0;
    /// True when c0 > sqrt(2)/2: no interior optimum, eta_star pinned to 1.
    bool clamped = false;
};

/// Strength that makes c(eta) = sqrt(2)/2. Throws std::invalid_argument for c0 outside (0, 1).
OptimalStrength optimal_eta(double c0);

struct Minimum {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
};

/// Golden-section search for the minimum of a unimodal function on [lo, hi].
/// Evaluates in long double so that a quadratic minimum can be located
/// below the sqrt(double epsilon) floor.
Minimum golden_section_minimize(const std::function<long double(long double)> &f, double lo, double hi,
                                double x_tol = 1e-12);

/// fine_expectation evaluated in long double.
long double fine_expectation_extended(long double c0, long double eta);

/// fine_expectation minus 1 - sqrt(2)/2, written as sqrt(2) sin^2((arccos c - pi/4)/2)
/// so that it keeps full relative precision near the minimum. Same minimizer as
/// fine_expectation; the objective handed to golden_section_minimize.
long double fine_excess_extended(long double c0, long double eta);

struct ObserverCurvePoint {
    double eta = 0.0;
    double d_rel = 0.0;
    double d_rev = 1.0;
    double fine = 0.5;
};

struct MultiObserverCurve {
    double k = 1.0;  // 1 / c0^(2 eta_tilde)
    std::vector<ObserverCurvePoint> points;
};

/// Bob's reliability and the joint reversibility while silent observers hold
/// a total fraction eta_tilde. Throws std::invalid_argument if any
/// eta + eta_tilde exceeds 1.
MultiObserverCurve multi_observer_curve(double c0, double eta_tilde, std::span<const double> etas);

/// Binary Shannon entropy in bits, with 0 log 0 = 0.
double binary_entropy(double p);

/// I(X;Y) = 1 - S(p_error) in bits.
double mutual_information(double p_error);

/// P_XY(x, y), x in {down, up}, y in {plus, minus}, for a uniformly random
/// spin read out with error probability p_error.
std::array<std::array<double, 2>, 2> joint_distribution(double p_error);

struct ObserverBound {
    double m_p = 0.0;            // 2 log(1/c0) / log(1/(4p))
    std::int64_t m_exact = 0;    // largest M with P_error(eta = 1/M) <= p
    bool unbounded = false;      // p too close to 1/4 for a finite answer
};

/// Number of equal-share observers that can each keep P_error <= p.
/// Throws std::invalid_argument unless c0 in (0, 1) and p in (0, 1/4).
ObserverBound max_observers(double c0, double p);
/// Same, taking ln c0 so that c0 below the double range can be used.
ObserverBound max_observers_log(double log_c0, double p);

}  // namespace qrev::analysis
