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

#include "qrev/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <thread>

#include "qrev/rng.hpp"

namespace qrev::protocol {

namespace {

constexpr double kZ95 = 1.959963984540054;

}  // namespace

void ProtocolConfig::validate() const {
    params.validate();
    if (n_runs < 1) {
        throw std::invalid_argument("n_runs must be at least 1");
    }
    if (!(alice_check_probability >= 0.0 && alice_check_probability <= 1.0)) {
        throw std::invalid_argument("alice_check_probability must lie in [0, 1]");
    }
    if (!observer_labels.empty() && observer_labels.size() != params.other_etas.size()) {
        throw std::invalid_argument("one label per silent observer is required");
    }
    const auto labels = resolved_observer_labels();
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size() || seen.contains(std::string(kBobProbe)) ||
        seen.contains(std::string(kCounterMode))) {
        throw std::invalid_argument("observer labels must be unique and distinct from 'bob' and 'counter'");
    }
}

std::vector<std::string> ProtocolConfig::resolved_observer_labels() const {
    if (!observer_labels.empty()) {
        return observer_labels;
    }
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < params.other_etas.size(); ++k) {
        labels.push_back("observer" + std::to_string(k + 2));
    }
    return labels;
}

RunRecord single_run(const ProtocolConfig &config, std::uint64_t run_index) {
    const ModelParams &params = config.params;
    Rng rng(config.master_seed, run_index);

    BranchState state = apply_premeasurement(prepare_bell_pair(), params, "B");
    const auto labels = config.resolved_observer_labels();
    for (std::size_t k = 0; k < labels.size(); ++k) {
        state = tap_probe(state, params.other_etas[k], labels[k]);
    }
    state = tap_probe(state, params.bob_eta, kBobProbe);
    auto [bob, measured] = measure_probe(state, kBobProbe, rng);
    const BranchState returned = apply_reversal(
        measured, params, config.reversal_knows_total_tap ? ReversalMode::knows_total_tap : ReversalMode::bob_only);

    RunRecord rec;
    rec.run_index = run_index;
    rec.bob_outcome = bob.sign;
    rec.bob_reported = bob.sign == Sign::plus ? Spin::up : Spin::down;
    if (rng.bernoulli(config.alice_check_probability)) {
        rec.alice_choice = AliceCheck::spin;
        const auto [spin, collapsed] = measure_qubit_spin(returned, "A", rng);
        rec.alice_result = spin.spin == rec.bob_reported ? AliceResult::agree : AliceResult::disagree;
    } else {
        rec.alice_choice = AliceCheck::bell;
        const auto [bell, projected] = measure_bell(returned, "A", "B", rng);
        rec.alice_result = bell.outcome == BellOutcome::psi_plus ? AliceResult::yes : AliceResult::no;
    }
    rec.fine_paid = rec.failed() ? config.fine_per_failure : 0.0;
    return rec;
}

std::vector<RunRecord> run_records(const ProtocolConfig &config) {
    config.validate();
    const auto n = static_cast<std::size_t>(config.n_runs);
    std::vector<RunRecord> records(n);
    unsigned workers = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            records[i] = single_run(config, i);
        }
    };
    if (workers <= 1) {
        work(0, n);
        return records;
    }
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(n, w * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                work(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    pool.clear();
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return records;
}

RateEstimate binomial_rate(std::int64_t events, std::int64_t trials) {
    RateEstimate r;
    r.trials = trials;
    r.events = events;
    if (trials > 0) {
        r.value = static_cast<double>(events) / static_cast<double>(trials);
        r.half_width = kZ95 * std::sqrt(r.value * (1.0 - r.value) / static_cast<double>(trials));
    }
    return r;
}

ProtocolStats aggregate(const ProtocolConfig &config, const std::vector<RunRecord> &records) {
    std::int64_t spin_checks = 0;
    std::int64_t disagreements = 0;
    std::int64_t bell_checks = 0;
    std::int64_t yes = 0;
    double fine_sum = 0.0;
    double fine_sq = 0.0;
    for (const auto &r : records) {
        if (r.alice_choice == AliceCheck::spin) {
            ++spin_checks;
            disagreements += r.alice_result == AliceResult::disagree ? 1 : 0;
        } else {
            ++bell_checks;
            yes += r.alice_result == AliceResult::yes ? 1 : 0;
        }
        fine_sum += r.fine_paid;
        fine_sq += r.fine_paid * r.fine_paid;
    }
    ProtocolStats s;
    s.n_runs = static_cast<std::int64_t>(records.size());
    s.p_error = binomial_rate(disagreements, spin_checks);
    s.fidelity = binomial_rate(yes, bell_checks);
    if (s.n_runs > 0) {
        const double n = static_cast<double>(s.n_runs);
        s.mean_fine = fine_sum / n;
        const double var = std::max(0.0, fine_sq / n - s.mean_fine * s.mean_fine);
        s.mean_fine_half_width = kZ95 * std::sqrt(var / n);
    }
    s.summed_fine = config.fine_per_failure * (s.p_error.value + 1.0 - s.fidelity.value);
    return s;
}

ProtocolStats run_monte_carlo(const ProtocolConfig &config) { return aggregate(config, run_records(config)); }

ClosedForms closed_forms(const ProtocolConfig &config) {
    const ModelParams &p = config.params;
    const double log_c0 = p.log_c0();
    ClosedForms f;
    f.c = std::exp(log_c_of_eta(log_c0, p.bob_eta));
    f.p_error = helstrom_error(f.c);
    f.d_rel = std::sqrt((1.0 - f.c) * (1.0 + f.c));
    f.k = std::exp(-2.0 * p.eta_tilde() * log_c0);
    double reversal_overlap = 1.0;
    if (!config.reversal_knows_total_tap) {
        // Counter left at +-delta when Bob undoes only his own residual.
        const double delta = (std::sqrt(std::max(0.0, 1.0 - p.eta_total())) - std::sqrt(1.0 - p.bob_eta)) * p.kick();
        reversal_overlap = std::exp(-2.0 * delta * delta);
    }
    f.d_rev = f.c * std::exp(p.eta_tilde() * log_c0) * reversal_overlap;
    f.fidelity = 0.5 * (1.0 + f.d_rev);
    const double q = config.alice_check_probability;
    f.mean_fine = config.fine_per_failure * (q * f.p_error + (1.0 - q) * (1.0 - f.fidelity));
    f.summed_fine = config.fine_per_failure * (f.p_error + 1.0 - f.fidelity);
    return f;
}

MultiObserverStats run_multi_observer(const ProtocolConfig &config) {
    MultiObserverStats out;
    out.stats = run_monte_carlo(config);
    out.expected = closed_forms(config);
    out.d_rev = 2.0 * out.stats.fidelity.value - 1.0;
    out.d_rev_half_width = 2.0 * out.stats.fidelity.half_width;
    out.d_rel = 1.0 - 2.0 * out.stats.p_error.value;
    out.d_rel_half_width = 2.0 * out.stats.p_error.half_width;
    const auto labels = config.resolved_observer_labels();
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const double eta_k = config.params.other_etas[k];
        const double c = std::exp(log_c_of_eta(config.params.log_c0(), eta_k));
        out.observers.push_back(
            ObserverReliability{labels[k], eta_k, helstrom_error(c), std::sqrt((1.0 - c) * (1.0 + c))});
    }
    return out;
}

}  // namespace qrev::protocol
