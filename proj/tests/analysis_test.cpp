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
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "qrev/coherent.hpp"

using namespace qrev;
using namespace qrev::analysis;

namespace {
const double kE2 = 0.13533528323661269189;  // e^-2
const double kE1 = 0.36787944117144232160;  // e^-1
}  // namespace

TEST(Tradeoff, reference_points) {
    const auto none = tradeoff_point(kE2, 0.0);
    EXPECT_DOUBLE_EQ(none.c, 1.0);
    EXPECT_DOUBLE_EQ(none.p_error, 0.5);
    EXPECT_DOUBLE_EQ(none.fidelity, 1.0);
    EXPECT_DOUBLE_EQ(none.d_rel, 0.0);
    EXPECT_DOUBLE_EQ(none.theta, 0.0);

    const auto half = tradeoff_point(kE2, 0.5);
    EXPECT_NEAR(half.c, kE1, 1e-15);
    EXPECT_NEAR(half.p_error, 0.035063252483903110631, 1e-14);
    EXPECT_NEAR(half.fidelity, 0.68393972058572116080, 1e-14);

    EXPECT_NEAR(half.d_rel, 0.92987349503219377874, 1e-14);
    const auto full = tradeoff_point(kE2, 1.0);
    EXPECT_NEAR(full.d_rel, std::sqrt(1.0 - kE2 * kE2), 1e-15);
    EXPECT_NEAR(full.d_rev, kE2, 1e-15);

    EXPECT_THROW(tradeoff_point(0.0, 0.5), std::invalid_argument);
    EXPECT_THROW(tradeoff_point(1.5, 0.5), std::invalid_argument);
}

TEST(Tradeoff, quarter_circle) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double c0 = std::exp(-20.0 * u(gen)) * 0.999 + 1e-9;
        const auto t = tradeoff_point(c0, u(gen));
        EXPECT_NEAR(t.d_rel * t.d_rel + t.d_rev * t.d_rev, 1.0, 1e-12);
        EXPECT_GE(t.theta, 0.0);
        EXPECT_LE(t.theta, std::numbers::pi / 2 + 1e-15);
        EXPECT_NEAR(t.d_rel, 1.0 - 2.0 * t.p_error, 1e-12);
        EXPECT_NEAR(t.d_rev, 2.0 * t.fidelity - 1.0, 1e-12);
    }
}

TEST(Tradeoff, monotone_in_strength) {
    double prev_d_rel = -1.0;
    double prev_d_rev = 2.0;
    for (int k = 0; k <= 100; ++k) {
        const auto t = tradeoff_point(kE2, k / 100.0);
        EXPECT_GT(t.d_rel, prev_d_rel);
        EXPECT_LT(t.d_rev, prev_d_rev);
        prev_d_rel = t.d_rel;
        prev_d_rev = t.d_rev;
    }
}

TEST(Optimum, closed_form_and_search_agree) {
    for (double c0 : {1e-6, 1e-3, kE2, 0.5, 0.7}) {
        for (double eta : {0.0, 0.3, 1.0}) {
            EXPECT_NEAR(static_cast<double>(fine_expectation_extended(c0, eta) - fine_excess_extended(c0, eta)),
                        0.29289321881345247560, 1e-15);
        }
        const auto opt = optimal_eta(c0);
        EXPECT_FALSE(opt.clamped);
        EXPECT_NEAR(opt.fine_min, 0.29289321881345247560, 1e-15);
        EXPECT_NEAR(std::pow(c0, opt.eta_star), std::numbers::sqrt2 / 2, 1e-12);
        const auto found = golden_section_minimize(
            [c0](long double eta) { return fine_excess_extended(c0, eta); }, 0.0, 1.0);
        EXPECT_NEAR(found.x, opt.eta_star, 1e-9) << "c0=" << c0;
        EXPECT_NEAR(found.value, 0.0, 1e-15);
        EXPECT_NEAR(static_cast<double>(fine_expectation_extended(c0, found.x)), opt.fine_min, 1e-15);
    }
    EXPECT_NEAR(optimal_eta(kE2).eta_star, 0.17328679513998632735, 1e-15);
}

TEST(Optimum, clamps_for_weak_coupling) {
    const auto opt = optimal_eta(0.9);
    EXPECT_TRUE(opt.clamped);
    EXPECT_EQ(opt.eta_star, 1.0);
    EXPECT_NEAR(opt.fine_min, fine_expectation(0.9, 1.0), 1e-15);
    EXPECT_GT(opt.fine_min, 0.29289321881345247560);
    EXPECT_THROW(optimal_eta(1.0), std::invalid_argument);
    EXPECT_THROW(optimal_eta(0.0), std::invalid_argument);
}

TEST(Optimum, golden_section_on_parabola) {
    const auto m = golden_section_minimize([](long double x) { return (x - 0.3L) * (x - 0.3L) + 2.0L; }, -1.0, 4.0);
    EXPECT_NEAR(m.x, 0.3, 1e-9);
    EXPECT_NEAR(m.value, 2.0, 1e-15);
    EXPECT_GT(m.iterations, 10);
}

TEST(MultiObserver, curve_is_scaled_circle) {
    const std::vector<double> etas{0.0, 0.1, 0.25, 0.5};
    const double et = 0.5;
    const auto curve = multi_observer_curve(kE2, et, etas);
    EXPECT_NEAR(curve.k, 7.3890560989306502272, 1e-13);
    ASSERT_EQ(curve.points.size(), etas.size());
    for (const auto &p : curve.points) {
        EXPECT_NEAR(p.d_rel * p.d_rel + curve.k * p.d_rev * p.d_rev, 1.0, 1e-12);
        EXPECT_LE(p.d_rev, std::pow(kE2, et) + 1e-15);
    }
    EXPECT_NEAR(curve.points[2].d_rev, 0.22313016014842982893, 1e-15);
    EXPECT_NEAR(0.5 * (1 + curve.points[2].d_rev), 0.61156508007421491447, 1e-15);
    EXPECT_THROW(multi_observer_curve(kE2, 0.6, std::vector<double>{0.5}), std::invalid_argument);
    EXPECT_EQ(multi_observer_curve(kE2, 0.0, etas).k, 1.0);
}

TEST(Information, endpoints_and_monotone) {
    EXPECT_EQ(mutual_information(0.5), 0.0);
    EXPECT_EQ(mutual_information(0.0), 1.0);
    EXPECT_EQ(mutual_information(1.0), 1.0);
    EXPECT_NEAR(mutual_information(0.14644660940672623780), 0.39912396330714389916, 1e-14);
    EXPECT_NEAR(mutual_information(0.146447), 0.39912296998768941502, 1e-14);
    double prev = -1.0;
    for (int k = 0; k <= 100; ++k) {
        const double info = mutual_information(tradeoff_point(kE2, k / 100.0).p_error);
        EXPECT_GE(info, prev);
        prev = info;
    }
    EXPECT_THROW(binary_entropy(1.5), std::invalid_argument);
}

TEST(Information, joint_distribution_cross_check) {
    for (double pe : {0.0, 0.03, 0.2, 0.5}) {
        const auto j = joint_distribution(pe);
        double total = 0.0;
        double info = 0.0;
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                total += j[x][y];
                const double px = j[x][0] + j[x][1];
                const double py = j[0][y] + j[1][y];
                if (j[x][y] > 0.0) {
                    info += j[x][y] * std::log2(j[x][y] / (px * py));
                }
            }
        }
        EXPECT_NEAR(total, 1.0, 1e-15);
        EXPECT_NEAR(info, mutual_information(pe), 1e-14);
        EXPECT_EQ(j[1][0], 0.5 * (1 - pe));  // up with "+"
    }
}

TEST(Observers, bound_for_reference_point) {
    const auto b = max_observers(std::exp(-50.0), 0.01);
    EXPECT_NEAR(b.m_p, 31.066746727980590535, 1e-12);
    EXPECT_EQ(b.m_exact, 30);
    EXPECT_FALSE(b.unbounded);
    EXPECT_NEAR(helstrom_error(std::exp(-50.0 / 30)), 0.0089995, 1e-7);
    EXPECT_NEAR(helstrom_error(std::exp(-50.0 / 31)), 0.0100316, 1e-7);
}

TEST(Observers, bound_properties) {
    for (double log_c0 : {-2.0, -8.0, -50.0, -400.0}) {
        for (double p : {1e-4, 0.01, 0.1, 0.2}) {
            const auto b = max_observers_log(log_c0, p);
            // The linearized bound never undercounts.
            EXPECT_LE(static_cast<double>(b.m_exact), b.m_p + 1e-9);
            if (b.m_exact > 0) {
                EXPECT_LE(helstrom_error(std::exp(log_c0 / b.m_exact)), p);
            }
            EXPECT_GT(helstrom_error(std::exp(log_c0 / (b.m_exact + 1))), p);
        }
    }
    EXPECT_EQ(max_observers(kE2, 1e-5).m_exact, 0);
    EXPECT_TRUE(max_observers_log(-1e14, 0.01).unbounded);
    EXPECT_THROW(max_observers(kE2, 0.3), std::invalid_argument);
    EXPECT_THROW(max_observers(1.0, 0.1), std::invalid_argument);
}
