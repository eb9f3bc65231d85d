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

#include "qrev/analysis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qrev/coherent.hpp"

namespace qrev::analysis {

namespace {

void require_c0(double c0) {
    if (!(c0 > 0.0 && c0 <= 1.0)) {
        throw std::invalid_argument("c0 must lie in (0, 1]");
    }
}

double p_error_at(double log_c0, double eta) { return helstrom_error(std::exp(log_c_of_eta(log_c0, eta))); }

constexpr double kUnboundedObservers = 1e12;

}  // namespace

TradeoffPoint tradeoff_point(double c0, double eta) {
    require_c0(c0);
    TradeoffPoint t;
    t.eta = eta;
    t.c = c_of_eta(c0, eta);
    t.p_error = helstrom_error(t.c);
    t.fidelity = 0.5 * (1.0 + t.c);
    t.d_rel = std::sqrt((1.0 - t.c) * (1.0 + t.c));
    t.d_rev = t.c;
    t.theta = std::atan2(t.d_rel, t.d_rev);
    t.fine_expectation = 1.0 - 0.5 * (t.d_rev + t.d_rel);
    return t;
}

double fine_expectation(double c0, double eta) { return tradeoff_point(c0, eta).fine_expectation; }

long double fine_expectation_extended(long double c0, long double eta) {
    const long double c = std::exp(eta * std::log(c0));
    return 1.0L - 0.5L * (c + std::sqrt((1.0L - c) * (1.0L + c)));
}

long double fine_excess_extended(long double c0, long double eta) {
    const long double c = std::exp(eta * std::log(c0));
    const long double half = 0.5L * (std::acos(c) - std::numbers::pi_v<long double> / 4.0L);
    const long double s = std::sin(half);
    return std::numbers::sqrt2_v<long double> * s * s;
}

OptimalStrength optimal_eta(double c0) {
    if (!(c0 > 0.0 && c0 < 1.0)) {
        throw std::invalid_argument("optimal strength needs c0 in (0, 1)");
    }
    constexpr double target = std::numbers::sqrt2 / 2.0;
    if (c0 > target) {
        return OptimalStrength{1.0, fine_expectation(c0, 1.0), true};
    }
    return OptimalStrength{std::log(target) / std::log(c0), 1.0 - target, false};
}

Minimum golden_section_minimize(const std::function<long double(long double)> &f, double lo, double hi,
                                double x_tol) {
    const long double inv_phi = (std::sqrt(5.0L) - 1.0L) / 2.0L;
    long double a = lo;
    long double b = hi;
    long double x1 = b - inv_phi * (b - a);
    long double x2 = a + inv_phi * (b - a);
    long double f1 = f(x1);
    long double f2 = f(x2);
    int iterations = 0;
    while (b - a > x_tol && iterations < 500) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        ++iterations;
    }
    const long double x = 0.5L * (a + b);
    return Minimum{static_cast<double>(x), static_cast<double>(f(x)), iterations};
}

MultiObserverCurve multi_observer_curve(double c0, double eta_tilde, std::span<const double> etas) {
    require_c0(c0);
    if (!(eta_tilde >= 0.0 && eta_tilde <= 1.0)) {
        throw std::invalid_argument("eta_tilde must lie in [0, 1]");
    }
    const double log_c0 = std::log(c0);
    MultiObserverCurve curve;
    curve.k = std::exp(-2.0 * eta_tilde * log_c0);
    for (double eta : etas) {
        if (!(eta >= 0.0) || eta + eta_tilde > 1.0 + 1e-12) {
            throw std::invalid_argument("eta + eta_tilde must not exceed 1");
        }
        const double c = std::exp(log_c_of_eta(log_c0, eta));
        ObserverCurvePoint p;
        p.eta = eta;
        p.d_rel = std::sqrt((1.0 - c) * (1.0 + c));
        p.d_rev = std::exp((eta + eta_tilde) * log_c0);
        p.fine = 1.0 - 0.5 * (p.d_rev + p.d_rel);
        curve.points.push_back(p);
    }
    return curve;
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("probability must lie in [0, 1]");
    }
    auto term = [](double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; };
    return term(p) + term(1.0 - p);
}

double mutual_information(double p_error) { return 1.0 - binary_entropy(p_error); }

std::array<std::array<double, 2>, 2> joint_distribution(double p_error) {
    if (!(p_error >= 0.0 && p_error <= 1.0)) {
        throw std::invalid_argument("probability must lie in [0, 1]");
    }
    const double right = 0.5 * (1.0 - p_error);
    const double wrong = 0.5 * p_error;
    // Spin up pairs with "+", spin down with "-".
    return {{{wrong, right}, {right, wrong}}};
}

ObserverBound max_observers(double c0, double p) {
    if (!(c0 > 0.0 && c0 < 1.0)) {
        throw std::invalid_argument("c0 must lie in (0, 1)");
    }
    return max_observers_log(std::log(c0), p);
}

ObserverBound max_observers_log(double log_c0, double p) {
    if (!(log_c0 < 0.0)) {
        throw std::invalid_argument("c0 must lie in (0, 1)");
    }
    if (!(p > 0.0 && p < 0.25)) {
        throw std::invalid_argument("error bound p must lie in (0, 1/4)");
    }
    ObserverBound out;
    out.m_p = 2.0 * (-log_c0) / std::log(1.0 / (4.0 * p));
    if (!std::isfinite(out.m_p) || out.m_p > kUnboundedObservers) {
        out.unbounded = true;
    }

    // P_error(eta = 1/M) grows with M; bracket by doubling, then bisect.
    auto ok = [&](std::int64_t m) { return p_error_at(log_c0, 1.0 / static_cast<double>(m)) <= p; };
    if (!ok(1)) {
        out.m_exact = 0;
        return out;
    }
    std::int64_t good = 1;
    std::int64_t bad = 2;
    while (ok(bad)) {
        good = bad;
        if (bad > static_cast<std::int64_t>(kUnboundedObservers)) {
            out.unbounded = true;
            out.m_exact = good;
            return out;
        }
        bad *= 2;
    }
    while (bad - good > 1) {
        const std::int64_t mid = good + (bad - good) / 2;
        (ok(mid) ? good : bad) = mid;
    }
    out.m_exact = good;
    return out;
}

}  // namespace qrev::analysis
