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

#include "qrev/coherent.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"

using namespace qrev;

namespace {

// High-precision references (50-digit evaluation of the closed forms).
constexpr double kExpMinus2 = 0.13533528323661269189;
constexpr double kExpMinus1 = 0.36787944117144232160;
constexpr double kPerrorAtSqrtHalf = 0.14644660940672623780;
constexpr double kCorrectAtSqrtHalf = 0.85355339059327376220;

}  // namespace

TEST(CoherentOverlap, identity_is_exactly_one) {
    const auto o = coherent_overlap(Complex{0.3, -1.2}, Complex{0.3, -1.2});
    EXPECT_EQ(o.log_magnitude, 0.0);
    EXPECT_EQ(o.phase, 0.0);
    EXPECT_EQ(o.value(), Complex(1.0, 0.0));
}

TEST(CoherentOverlap, opposite_unit_amplitudes) {
    const auto o = coherent_overlap(1.0, -1.0);
    EXPECT_NEAR(o.value().real(), kExpMinus2, 1e-16);
    EXPECT_NEAR(o.value().imag(), 0.0, 1e-16);
    EXPECT_DOUBLE_EQ(o.log_magnitude, -2.0);
}

TEST(CoherentOverlap, matches_c0_for_unit_kick) {
    ModelParams p;
    p.n_qutrits = 4;
    p.epsilon = 0.25;
    const auto o = coherent_overlap(p.kick(), -p.kick());
    EXPECT_NEAR(o.log_magnitude, std::log(c0_of(p)), 1e-12);
    EXPECT_NEAR(o.value().real(), kExpMinus2, 1e-15);
}

TEST(CoherentOverlap, no_underflow_for_large_separation) {
    const auto o = coherent_overlap(50.0, -50.0);
    EXPECT_DOUBLE_EQ(o.log_magnitude, -5000.0);
    EXPECT_EQ(o.value(), Complex(0.0, 0.0));
}

TEST(CoherentOverlap, complex_phase) {
    // <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b), compared against direct evaluation.
    const Complex a{0.4, 0.7};
    const Complex b{-0.2, 0.5};
    const Complex direct = std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
    const Complex got = coherent_overlap(a, b).value();
    EXPECT_NEAR(got.real(), direct.real(), 1e-15);
    EXPECT_NEAR(got.imag(), direct.imag(), 1e-15);
}

TEST(CoherentOverlap, rejects_non_finite_amplitude) {
    EXPECT_THROW(CoherentAmplitude(std::nan("")), std::invalid_argument);
    EXPECT_THROW(CoherentAmplitude(Complex(0.0, INFINITY)), std::invalid_argument);
}

TEST(CoherentOverlap, real_displacement_covariance) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = u(gen);
        const double b = u(gen);
        const double d = u(gen);
        EXPECT_NEAR(coherent_overlap(a + d, b + d).log_magnitude, coherent_overlap(a, b).log_magnitude,
                    1e-12 * (1.0 + std::abs(a - b) * std::abs(a - b)));
    }
}

TEST(C0, values) {
    ModelParams p;
    p.n_qutrits = 2;
    p.epsilon = 0.5;
    EXPECT_NEAR(c0_of(p), kExpMinus2, 1e-16);

    p.n_qutrits = 5;
    p.epsilon = 1.0;
    EXPECT_EQ(p.log_c0(), -50.0);

    ModelParams zero;
    zero.epsilon = 0.0;
    EXPECT_EQ(c0_of(zero), 1.0);
}

TEST(ModelParams, validation) {
    ModelParams p;
    p.epsilon = 0.5;
    p.bob_eta = 0.6;
    p.other_etas = {0.3};
    EXPECT_NO_THROW(p.validate());
    p.other_etas = {0.3, 0.2};
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p.other_etas = {0.0};
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p.other_etas.clear();
    p.n_qutrits = 0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p.n_qutrits = 1;
    p.bob_eta = 1.5;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(COfEta, endpoints_and_half) {
    EXPECT_EQ(c_of_eta(0.3, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(c_of_eta(0.3, 1.0), 0.3);
    EXPECT_NEAR(c_of_eta(kExpMinus2, 0.5), kExpMinus1, 1e-15);
    EXPECT_THROW(c_of_eta(0.3, -0.1), std::invalid_argument);
    EXPECT_THROW(c_of_eta(0.3, 1.1), std::invalid_argument);
}

TEST(COfEta, multiplicative) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double c0 = std::max(1e-6, u(gen));
        const double e1 = 0.5 * u(gen);
        const double e2 = 0.5 * u(gen);
        EXPECT_NEAR(c_of_eta(c0, e1 + e2), c_of_eta(c0, e1) * c_of_eta(c0, e2), 1e-12);
    }
}

TEST(Discrimination, orthogonal_states) {
    const auto d = make_discrimination(0.0);
    EXPECT_EQ(d.gamma, 1.0);
    EXPECT_EQ(d.beta_coef, 0.0);
    EXPECT_EQ(d.p_error, 0.0);
    const auto amps = projection_amplitudes(d);
    EXPECT_EQ(amps.same_sign, 1.0);
    EXPECT_EQ(amps.opposite_sign, 0.0);
}

TEST(Discrimination, sqrt_half_overlap) {
    const auto d = make_discrimination(std::numbers::sqrt2 / 2.0);
    EXPECT_NEAR(d.p_error, kPerrorAtSqrtHalf, 1e-15);
    const auto amps = projection_amplitudes(d);
    EXPECT_NEAR(amps.same_sign * amps.same_sign, kCorrectAtSqrtHalf, 1e-15);
    EXPECT_NEAR(amps.opposite_sign * amps.opposite_sign, kPerrorAtSqrtHalf, 1e-15);
}

TEST(Discrimination, degenerate_limit) {
    EXPECT_THROW(make_discrimination(1.0), DegenerateDiscrimination);
    EXPECT_THROW(make_discrimination(1.0 - 1e-10), DegenerateDiscrimination);
    EXPECT_FALSE(try_make_discrimination(1.0).has_value());
    // The closed form itself tends to 1/2.
    EXPECT_NEAR(helstrom_error(1.0), 0.5, 1e-15);
}

TEST(Discrimination, clamps_tiny_excursions_and_rejects_large_ones) {
    EXPECT_EQ(make_discrimination(-1e-13).c, 0.0);
    EXPECT_THROW(make_discrimination(-1e-6), std::invalid_argument);
    EXPECT_THROW(make_discrimination(1.5), std::invalid_argument);
}

TEST(Discrimination, invariants_hold_across_overlaps) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0 - 1e-9);
    for (int i = 0; i < 10000; ++i) {
        const double c = i == 0 ? 0.0 : u(gen);
        const auto d = make_discrimination(c);
        const double g = d.gamma;
        const double b = d.beta_coef;
        // |+-> normalized and mutually orthogonal; scale by gamma^2 since both grow near c = 1.
        const double scale = std::max(1.0, g * g);
        EXPECT_NEAR(g * g + b * b - 2.0 * g * b * c, 1.0, 1e-12 * scale);
        EXPECT_NEAR((g * g + b * b) * c - 2.0 * g * b, 0.0, 1e-12 * scale);
        EXPECT_NEAR(d.p_error, (1.0 - std::sqrt(1.0 - c * c)) / 2.0, 1e-12);

        const auto amps = projection_amplitudes(d);
        EXPECT_NEAR(amps.same_sign * amps.same_sign + amps.opposite_sign * amps.opposite_sign, 1.0, 1e-12);
        EXPECT_NEAR(amps.same_sign * amps.same_sign, 1.0 - d.p_error, 1e-12);
        if (c < 0.99) {
            EXPECT_NEAR(amps.same_sign, g - b * c, 1e-12);
            EXPECT_NEAR(amps.opposite_sign, g * c - b, 1e-12);
        }
    }
}

TEST(Discrimination, p_error_monotone_in_eta) {
    for (double c0 : {1e-6, 0.01, 0.3, 0.9}) {
        double prev = 0.5;
        for (int k = 0; k <= 1000; ++k) {
            const double pe = helstrom_error(c_of_eta(c0, k / 1000.0));
            EXPECT_LE(pe, prev + 1e-15);
            prev = pe;
        }
    }
}

TEST(LogProjection, agrees_with_linear_and_survives_underflow) {
    const double c = 0.37;
    const auto lin = projection_amplitudes(make_discrimination(c));
    const auto lg = log_projection_amplitudes(std::log(c));
    EXPECT_NEAR(std::exp(lg.same_sign), lin.same_sign, 1e-15);
    EXPECT_NEAR(std::exp(lg.opposite_sign), lin.opposite_sign, 1e-15);

    const auto far = log_projection_amplitudes(-5000.0);
    EXPECT_EQ(far.same_sign, 0.0);
    EXPECT_NEAR(far.opposite_sign, -5000.0 - std::log(2.0), 1e-9);
}
