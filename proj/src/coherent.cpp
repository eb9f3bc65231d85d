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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qrev {

CoherentAmplitude::CoherentAmplitude(Complex v) : value(v) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw std::invalid_argument("coherent amplitude must be finite");
    }
}

CoherentAmplitude::CoherentAmplitude(double re) : CoherentAmplitude(Complex{re, 0.0}) {}

Complex OverlapScalar::value() const { return std::polar(std::exp(log_magnitude), phase); }

double OverlapScalar::magnitude() const { return std::exp(log_magnitude); }

double ModelParams::eta_tilde() const { return std::accumulate(other_etas.begin(), other_etas.end(), 0.0); }

double ModelParams::log_c0() const {
    const double k = kick();
    return -2.0 * k * k;
}

void ModelParams::validate() const {
    if (n_qutrits < 1) {
        throw std::invalid_argument("n_qutrits must be positive, got " + std::to_string(n_qutrits));
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("epsilon must be a positive finite number");
    }
    if (!(omega >= 0.0) || !std::isfinite(omega)) {
        throw std::invalid_argument("omega must be nonnegative");
    }
    if (!(bob_eta >= 0.0 && bob_eta <= 1.0)) {
        throw std::invalid_argument("measurement strength eta must lie in [0, 1]");
    }
    for (double e : other_etas) {
        if (!(e > 0.0 && e <= 1.0)) {
            throw std::invalid_argument("observer fractions must lie in (0, 1]");
        }
    }
    if (eta_total() > 1.0 + 1e-12) {
        throw std::invalid_argument("total tapped fraction exceeds 1");
    }
}

DegenerateDiscrimination::DegenerateDiscrimination(double c)
    : std::domain_error("probe states indistinguishable (overlap " + std::to_string(c) + ")"), overlap_(c) {}

OverlapScalar coherent_overlap(const CoherentAmplitude &alpha, const CoherentAmplitude &beta) {
    // Re(-|a|^2/2 - |b|^2/2 + conj(a) b) = -|a - b|^2 / 2.
    const Complex cross = std::conj(alpha.value) * beta.value;
    return OverlapScalar{-0.5 * std::norm(alpha.value - beta.value), cross.imag()};
}

double c0_of(const ModelParams &params) { return std::exp(params.log_c0()); }

double c_of_eta(double c0, double eta) {
    if (!(c0 > 0.0 && c0 <= 1.0)) {
        throw std::invalid_argument("c0 must lie in (0, 1]");
    }
    return std::exp(log_c_of_eta(std::log(c0), eta));
}

double log_c_of_eta(double log_c0, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw std::invalid_argument("eta must lie in [0, 1]");
    }
    if (eta == 0.0) {
        return 0.0;
    }
    return eta * log_c0;
}

double helstrom_error(double c) {
    const double root = std::sqrt((1.0 - c) * (1.0 + c));
    return c * c / (2.0 * (1.0 + root));
}

std::optional<DiscriminationSpec> try_make_discrimination(double c) {
    if (!(c >= -kOverlapClampTol && c <= 1.0 + kOverlapClampTol)) {
        throw std::invalid_argument("overlap must lie in [0, 1], got " + std::to_string(c));
    }
    c = std::clamp(c, 0.0, 1.0);
    if (c >= 1.0 - kDegenerateOverlapTol) {
        return std::nullopt;
    }
    const double s = std::sqrt(1.0 + c);
    const double d = std::sqrt(1.0 - c);
    const double sum = s + d;
    const double diff = 2.0 * c / sum;
    const double denom = 2.0 * s * d;
    return DiscriminationSpec{c, sum / denom, diff / denom, helstrom_error(c)};
}

DiscriminationSpec make_discrimination(double c) {
    auto spec = try_make_discrimination(c);
    if (!spec) {
        throw DegenerateDiscrimination(c);
    }
    return *spec;
}

ProjectionAmplitudes projection_amplitudes(const DiscriminationSpec &spec) {
    // gamma - beta c = (s + d) / 2 and gamma c - beta = (s - d) / 2.
    const double s = std::sqrt(1.0 + spec.c);
    const double d = std::sqrt(1.0 - spec.c);
    return ProjectionAmplitudes{0.5 * (s + d), spec.c / (s + d)};
}

LogProjectionAmplitudes log_projection_amplitudes(double log_c) {
    if (!(log_c <= 0.0)) {
        throw std::invalid_argument("log overlap must be nonpositive");
    }
    const double c = std::exp(log_c);
    const double sum = std::sqrt(1.0 + c) + std::sqrt(1.0 - c);
    return LogProjectionAmplitudes{std::log(0.5 * sum), log_c - std::log(sum)};
}

}  // namespace qrev
