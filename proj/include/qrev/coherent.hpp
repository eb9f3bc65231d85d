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

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qrev {

using Complex = std::complex<double>;

/// Mode amplitude alpha of a coherent state |alpha>.
struct CoherentAmplitude {
    Complex value{0.0, 0.0};

    CoherentAmplitude() = default;
    CoherentAmplitude(Complex v);  // NOLINT(google-explicit-constructor)
    CoherentAmplitude(double re);  // NOLINT(google-explicit-constructor)

    bool operator==(const CoherentAmplitude &other) const = default;
};

/// <alpha|beta> kept as log|.| and arg so that tiny overlaps survive.
///
/// value() is lossy once exp(log_magnitude) drops below ~1e-300.
struct OverlapScalar {
    double log_magnitude = 0.0;
    double phase = 0.0;

    Complex value() const;
    double magnitude() const;
};

/// Physical configuration of the measurement apparatus.
///
/// n_qutrits and epsilon fix the counter kick N*epsilon; bob_eta is the
/// measurement strength and other_etas the fractions tapped by silent
/// observers. All fractions are of the counter's initial energy.
struct ModelParams {
    int n_qutrits = 1;
    double epsilon = 0.0;
    double omega = 0.0;
    double bob_eta = 0.0;
    std::vector<double> other_etas;

    /// Throws std::invalid_argument if any field is out of range.
    void validate() const;

    double kick() const { return n_qutrits * epsilon; }
    double eta_tilde() const;
    double eta_total() const { return bob_eta + eta_tilde(); }
    /// ln c0 = -2 N^2 eps^2, exact even when c0 underflows.
    double log_c0() const;
};

/// Thrown when two probe states are too close to tell apart (c ~ 1).
class DegenerateDiscrimination : public std::domain_error {
   public:
    explicit DegenerateDiscrimination(double c);
    double overlap() const { return overlap_; }

   private:
    double overlap_;
};

/// Optimal (Helstrom) projective measurement distinguishing |+A> from |-A>
/// with real overlap c. The projectors are
///   |+> = gamma |+A> - beta |-A>,   |-> = gamma |-A> - beta |+A>.
struct DiscriminationSpec {
    double c = 0.0;
    double gamma = 1.0;
    double beta_coef = 0.0;
    double p_error = 0.0;
};

/// <outcome| probe> for the two possible probe states, given a fixed outcome.
/// same_sign = <+|+A> = <-|-A>, opposite_sign = <+|-A> = <-|+A>.
struct ProjectionAmplitudes {
    double same_sign = 1.0;
    double opposite_sign = 0.0;
};

constexpr double kDegenerateOverlapTol = 1e-9;
constexpr double kOverlapClampTol = 1e-12;

OverlapScalar coherent_overlap(const CoherentAmplitude &alpha, const CoherentAmplitude &beta);

double c0_of(const ModelParams &params);

/// c(eta) = c0^eta. Throws std::invalid_argument for eta outside [0, 1] or c0 outside (0, 1].
double c_of_eta(double c0, double eta);

/// Same as c_of_eta but in log domain: returns eta * log_c0.
double log_c_of_eta(double log_c0, double eta);

/// Throws DegenerateDiscrimination when c >= 1 - kDegenerateOverlapTol and
/// std::invalid_argument when c lies outside [0, 1] by more than kOverlapClampTol.
DiscriminationSpec make_discrimination(double c);

/// Non-throwing form for the degenerate case; still throws on invalid c.
std::optional<DiscriminationSpec> try_make_discrimination(double c);

/// Error probability (1 - sqrt(1 - c^2)) / 2, evaluated without cancellation.
double helstrom_error(double c);

ProjectionAmplitudes projection_amplitudes(const DiscriminationSpec &spec);

/// Logs of the two projection amplitudes for overlap c = exp(log_c).
/// Finite for any log_c < 0, so probe states far apart keep their
/// (astronomically small) wrong-outcome weight.
struct LogProjectionAmplitudes {
    double same_sign = 0.0;
    double opposite_sign = 0.0;
};
LogProjectionAmplitudes log_projection_amplitudes(double log_c);

}  // namespace qrev
