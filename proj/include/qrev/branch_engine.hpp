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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qrev/coherent.hpp"
#include "qrev/rng.hpp"

/// Exact pure-state evolution of qubits, a block of N qutrits, a counter
/// oscillator and any number of probe oscillators.
///
/// The global state is a short superposition of product kets ("branches").
/// Every oscillator is in a coherent state in every branch, so inner products
/// between branches are products of coherent-state overlaps and all
/// probabilities follow from the branch Gram matrix without truncation.
namespace qrev {

enum class Spin : std::uint8_t { down = 0, up = 1 };

/// Collective label of the N qutrits: |r>^N, |d>^N or |u>^N.
enum class QutritLabel : std::uint8_t { ready, all_d, all_u };

enum class Sign : std::uint8_t { plus, minus };

enum class BellOutcome : std::uint8_t { psi_plus = 0, psi_minus = 1, phi_plus = 2, phi_minus = 3 };

/// How the reversal unitary chooses the counter displacement.
enum class ReversalMode : std::uint8_t {
    /// Undo the true residual sqrt(1 - eta_T) N eps, counter returns to 0.
    knows_total_tap,
    /// Undo only sqrt(1 - eta_bob) N eps, ignoring silent observers.
    bob_only,
};

inline constexpr std::string_view kCounterMode = "counter";

struct RegisterLayout {
    std::vector<std::string> qubit_labels;
    int n_qutrits = 0;  // 0 until pre-measurement attaches the detector
    std::vector<std::string> mode_names;

    std::size_t qubit_index(std::string_view name) const;
    std::optional<std::size_t> find_mode(std::string_view name) const;
    std::size_t mode_index(std::string_view name) const;
};

struct Branch {
    Complex amplitude{1.0, 0.0};
    std::vector<Spin> qubits;
    QutritLabel qutrits = QutritLabel::ready;
    std::vector<CoherentAmplitude> modes;
};

struct MeasurementOutcome {
    Sign sign = Sign::plus;
    double probability = 0.0;
};

struct SpinOutcome {
    Spin spin = Spin::down;
    double probability = 0.0;
};

struct BellResult {
    BellOutcome outcome = BellOutcome::psi_plus;
    double probability = 0.0;
};

/// Immutable superposition of branches over a fixed register layout.
class BranchState {
   public:
    BranchState(RegisterLayout layout, std::vector<Branch> branches);

    const RegisterLayout &layout() const { return layout_; }
    const std::vector<Branch> &branches() const { return branches_; }

    /// Index of the qubit the detector is coupled to, once pre-measured.
    std::optional<std::size_t> measured_qubit() const { return measured_qubit_; }
    /// Fraction of the counter's initial energy moved into probes so far.
    double tapped_fraction() const { return tapped_fraction_; }

    double norm_squared() const;

   private:
    friend struct BranchStateAccess;

    RegisterLayout layout_;
    std::vector<Branch> branches_;
    std::optional<std::size_t> measured_qubit_;
    double tapped_fraction_ = 0.0;
};

/// Probabilities of both probe outcomes, indexed by Sign.
struct ProbeProbabilities {
    double plus = 0.5;
    double minus = 0.5;
    bool degenerate = false;

    double of(Sign s) const { return s == Sign::plus ? plus : minus; }
};

/// a|down> + b|up> on a qubit named "q", detector ready, counter at rest.
BranchState prepare_single_qubit(Complex a, Complex b);

/// (|up,up> + |down,down>)/sqrt(2) on qubits "A", "B".
BranchState prepare_bell_pair();

/// Couples `qubit` to the N qutrits and the counter: down -> (all_d, -N eps),
/// up -> (all_u, +N eps). Throws std::logic_error if already pre-measured.
BranchState apply_premeasurement(const BranchState &state, const ModelParams &params, std::string_view qubit);
/// Single-qubit convenience overload.
BranchState apply_premeasurement(const BranchState &state, const ModelParams &params);

/// Free counter oscillation for time t: alpha -> alpha exp(-i omega t).
BranchState evolve_counter_phase(const BranchState &state, double t, const ModelParams &params);

/// Moves a fraction `eta_k` of the counter's initial energy into a new probe
/// mode. With T already tapped the counter goes from sqrt(1-T) alpha0 to
/// sqrt(1-T-eta_k) alpha0 and the probe receives sqrt(eta_k) alpha0, so the
/// final amplitudes do not depend on the order of taps.
BranchState tap_probe(const BranchState &state, double eta_k, std::string_view probe_name);

ProbeProbabilities probe_outcome_probabilities(const BranchState &state, std::string_view probe_name);

/// Optimal two-outcome measurement of a probe carrying +-A, followed by
/// removal of the probe mode and renormalization.
std::pair<MeasurementOutcome, BranchState> measure_probe(const BranchState &state, std::string_view probe_name,
                                                          Rng &rng);
/// Conditional state for a chosen outcome. Throws std::domain_error if the
/// outcome has zero amplitude in every branch.
std::pair<MeasurementOutcome, BranchState> measure_probe_forced(const BranchState &state, std::string_view probe_name,
                                                                 Sign outcome);

/// Resets qutrits to ready and displaces the counter back towards 0.
BranchState apply_reversal(const BranchState &state, const ModelParams &params,
                           ReversalMode mode = ReversalMode::knows_total_tap);

/// {P(down), P(up)} for the named qubit.
std::array<double, 2> spin_probabilities(const BranchState &state, std::string_view qubit);
std::pair<SpinOutcome, BranchState> measure_qubit_spin(const BranchState &state, std::string_view qubit, Rng &rng);
std::pair<SpinOutcome, BranchState> measure_qubit_spin_forced(const BranchState &state, std::string_view qubit,
                                                               Spin outcome);

/// Probabilities of the four Bell outcomes, indexed by BellOutcome.
std::array<double, 4> bell_probabilities(const BranchState &state, std::string_view qubit_a,
                                         std::string_view qubit_b);
std::pair<BellResult, BranchState> measure_bell(const BranchState &state, std::string_view qubit_a,
                                                std::string_view qubit_b, Rng &rng);
std::pair<BellResult, BranchState> measure_bell_forced(const BranchState &state, std::string_view qubit_a,
                                                       std::string_view qubit_b, BellOutcome outcome);

/// <Psi+| rho_AB |Psi+>, no sampling.
double fidelity_with_bell(const BranchState &state, std::string_view qubit_a = "A", std::string_view qubit_b = "B");

/// Reduced density matrix of the listed qubits, row-major, dimension 2^k.
/// Basis index bit (k-1-i) holds qubit i, with up = 1.
std::vector<Complex> reduced_density_matrix(const BranchState &state, std::span<const std::string> qubits);

/// |<a|b>|^2 for normalized states over identical layouts.
double state_overlap_squared(const BranchState &a, const BranchState &b);

/// Bell basis vectors over (A, B) in the index order of reduced_density_matrix.
std::array<Complex, 4> bell_vector(BellOutcome outcome);

}  // namespace qrev
