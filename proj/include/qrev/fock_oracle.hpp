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
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qrev/branch_engine.hpp"
#include "qrev/coherent.hpp"
#include "qrev/rng.hpp"

/// Brute-force reference simulator in a truncated number basis.
///
/// Qubits A and B, N explicit qutrits (3^N states) and every oscillator as a
/// Fock ladder cut off at d levels. Displacements and beamsplitters are
/// exponentials of the truncated generators; the probe measurement uses the
/// eigenvectors of |+A><+A| - |-A><-A|. Shares no code path with the branch
/// engine beyond the ModelParams struct, so agreement between the two is a
/// genuine check. Not meant for N > 3 or amplitudes above ~2.
namespace qrev::oracle {

/// Thrown when a cutoff would lose more than the allowed coherent-state weight.
class CutoffError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Qutrit basis order.
enum class Trit : int { r = 0, d = 1, u = 2 };

/// Levels needed for amplitude alpha: ceil(|alpha|^2 + 8|alpha| + 16).
int cutoff_for(double alpha);

/// 1 - sum_{n<d} e^{-|a|^2} |a|^{2n}/n!.
double coherent_tail_weight(double alpha, int d);

/// exp(alpha a^dag - alpha a) on d levels, alpha real.
Eigen::MatrixXcd displacement_matrix(double alpha, int d);

/// Number-conserving two-mode exponential exp(theta (b^dag a - a^dag b)) with
/// sin(theta)^2 = ratio, as a (dc*dp) x (dc*dp) matrix over |i>_a|j>_b
/// (index i*dp + j). Only used by tests; the oracle applies it blockwise.
Eigen::MatrixXcd beamsplitter_matrix(double ratio, int dc, int dp);

/// Normalized truncated coherent vector for real amplitude alpha.
Eigen::VectorXcd coherent_vector(double alpha, int d);

struct DenseState {
    /// Axis names: "A", "B", "t0".."t{N-1}", "counter", then probe names.
    std::vector<std::string> axes;
    std::vector<int> dims;
    std::vector<Complex> amplitudes;

    std::size_t axis(const std::string &name) const;
    double norm_squared() const;
};

struct Premeasure {};
struct Tap {
    double eta = 0.0;
    std::string probe;
};
struct MeasureProbe {
    std::string probe;
    std::optional<Sign> forced;
};
struct Reverse {
    ReversalMode mode = ReversalMode::knows_total_tap;
};
using Step = std::variant<Premeasure, Tap, MeasureProbe, Reverse>;

struct Scenario {
    ModelParams params;
    /// Initial amplitudes over (A, B), index 2*A + B with up = 1.
    std::array<Complex, 4> initial_ab{};
    std::vector<Step> steps;
};

struct TraceEntry {
    std::string probe;
    Sign sign = Sign::plus;
    double probability = 0.0;
    /// {P(+), P(-)} before the outcome was chosen.
    std::array<double, 2> outcome_probabilities{0.5, 0.5};
};

struct OracleResult {
    std::vector<TraceEntry> trace;
    DenseState state;
    /// Reduced density matrix of (A, B), row-major, index 2*A + B.
    std::array<Complex, 16> rho_ab{};
    double fidelity = 0.0;  // <Psi+|rho_AB|Psi+>
};

/// Bell pair (|uu> + |dd>)/sqrt(2).
std::array<Complex, 4> bell_initial();
/// A fixed down, B = a|down> + b|up>.
std::array<Complex, 4> single_qubit_initial(Complex a, Complex b);

/// Pre-measure B, silent taps, Bob's tap, Bob's measurement, reversal.
std::vector<Step> standard_script(const ModelParams &params, std::optional<Sign> bob_outcome,
                                  ReversalMode mode = ReversalMode::knows_total_tap);

/// Runs the scenario. Unforced measurements draw from rng.
OracleResult oracle_run(const Scenario &scenario, Rng &rng);

}  // namespace qrev::oracle
