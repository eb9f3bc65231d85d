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

#include <cstdint>
#include <string>
#include <vector>

#include "qrev/branch_engine.hpp"
#include "qrev/coherent.hpp"

/// Alice-Bob verification game run as a seeded Monte Carlo.
///
/// Each run: Alice prepares |Psi+>_AB and hands B to Bob. Silent observers
/// tap the counter, Bob taps and measures his probe, reverses the detector
/// and reports "spin up" for "+" and "spin down" for "-". Alice then either
/// measures A and compares with Bob's report, or projects AB onto the Bell
/// basis. A failed check costs Bob one fine.
namespace qrev::protocol {

inline constexpr std::string_view kBobProbe = "bob";

enum class AliceCheck : std::uint8_t { spin, bell };
enum class AliceResult : std::uint8_t { agree, disagree, yes, no };

struct ProtocolConfig {
    ModelParams params;
    std::int64_t n_runs = 1;
    /// Probability that Alice performs the spin check rather than the Bell check.
    double alice_check_probability = 0.5;
    double fine_per_failure = 1.0;
    std::uint64_t master_seed = 0;
    bool reversal_knows_total_tap = true;
    /// Names of the silent observers' probes; defaults to observer2, observer3, ...
    std::vector<std::string> observer_labels;
    /// Worker threads for run_monte_carlo; 0 picks the hardware concurrency.
    unsigned threads = 0;

    void validate() const;
    std::vector<std::string> resolved_observer_labels() const;
};

struct RunRecord {
    std::uint64_t run_index = 0;
    Sign bob_outcome = Sign::plus;
    Spin bob_reported = Spin::up;
    AliceCheck alice_choice = AliceCheck::spin;
    AliceResult alice_result = AliceResult::agree;
    double fine_paid = 0.0;

    bool failed() const { return alice_result == AliceResult::disagree || alice_result == AliceResult::no; }
    bool operator==(const RunRecord &) const = default;
};

/// Fraction of successes among a number of trials with a 95% normal interval.
struct RateEstimate {
    std::int64_t trials = 0;
    std::int64_t events = 0;
    double value = 0.0;
    double half_width = 0.0;
};

struct ProtocolStats {
    std::int64_t n_runs = 0;
    RateEstimate p_error;   // disagreements among spin checks
    RateEstimate fidelity;  // "yes" among Bell checks
    double mean_fine = 0.0;
    double mean_fine_half_width = 0.0;
    /// 1 - F + P_error from the empirical rates: both penalties counted every run.
    double summed_fine = 0.0;
};

/// Values the Monte Carlo rates converge to.
struct ClosedForms {
    double c = 1.0;
    double p_error = 0.5;
    double fidelity = 1.0;
    double mean_fine = 0.0;
    double summed_fine = 0.0;
    double d_rel = 0.0;
    double d_rev = 1.0;
    double k = 1.0;
};

struct ObserverReliability {
    std::string label;
    double eta = 0.0;
    double p_error = 0.5;
    double d_rel = 0.0;
};

struct MultiObserverStats {
    ProtocolStats stats;
    ClosedForms expected;
    double d_rev = 1.0;
    double d_rev_half_width = 0.0;
    double d_rel = 0.0;
    double d_rel_half_width = 0.0;
    /// Silent observers never read their probes; their reliability is the closed form.
    std::vector<ObserverReliability> observers;
};

RunRecord single_run(const ProtocolConfig &config, std::uint64_t run_index);

/// All n_runs records in run-index order; identical for any thread count.
std::vector<RunRecord> run_records(const ProtocolConfig &config);

ProtocolStats aggregate(const ProtocolConfig &config, const std::vector<RunRecord> &records);

ProtocolStats run_monte_carlo(const ProtocolConfig &config);

MultiObserverStats run_multi_observer(const ProtocolConfig &config);

ClosedForms closed_forms(const ProtocolConfig &config);

RateEstimate binomial_rate(std::int64_t events, std::int64_t trials);

}  // namespace qrev::protocol
