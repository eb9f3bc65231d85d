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

#include "qrev/branch_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qrev {

struct BranchStateAccess {
    static BranchState make(RegisterLayout layout, std::vector<Branch> branches, const BranchState &like) {
        BranchState out(std::move(layout), std::move(branches));
        out.measured_qubit_ = like.measured_qubit_;
        out.tapped_fraction_ = like.tapped_fraction_;
        return out;
    }
    static void set_measured_qubit(BranchState &s, std::size_t q) { s.measured_qubit_ = q; }
    static void set_tapped_fraction(BranchState &s, double t) { s.tapped_fraction_ = t; }
};

namespace {

constexpr double kNormTol = 1e-9;

/// <x|y> over every register except the amplitudes, optionally ignoring some
/// qubits and one mode. Zero when any compared label differs.
Complex rest_overlap(const Branch &x, const Branch &y, const std::vector<bool> *skip_qubit = nullptr,
                     std::optional<std::size_t> skip_mode = std::nullopt) {
    if (x.qutrits != y.qutrits) {
        return {0.0, 0.0};
    }
    for (std::size_t q = 0; q < x.qubits.size(); ++q) {
        if ((skip_qubit == nullptr || !(*skip_qubit)[q]) && x.qubits[q] != y.qubits[q]) {
            return {0.0, 0.0};
        }
    }
    double log_mag = 0.0;
    double phase = 0.0;
    for (std::size_t m = 0; m < x.modes.size(); ++m) {
        if (skip_mode && *skip_mode == m) {
            continue;
        }
        const OverlapScalar o = coherent_overlap(x.modes[m], y.modes[m]);
        log_mag += o.log_magnitude;
        phase += o.phase;
    }
    return std::polar(std::exp(log_mag), phase);
}

double gram_norm_squared(const std::vector<Branch> &branches) {
    double total = 0.0;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        total += std::norm(branches[i].amplitude);
        for (std::size_t j = i + 1; j < branches.size(); ++j) {
            const Complex term =
                std::conj(branches[i].amplitude) * branches[j].amplitude * rest_overlap(branches[i], branches[j]);
            total += 2.0 * term.real();
        }
    }
    return total;
}

void renormalize(std::vector<Branch> &branches) {
    const double n2 = gram_norm_squared(branches);
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
        throw std::domain_error("state has zero norm after projection");
    }
    const double scale = 1.0 / std::sqrt(n2);
    for (auto &b : branches) {
        b.amplitude *= scale;
    }
}

bool same_kets(const Branch &x, const Branch &y) {
    return x.qutrits == y.qutrits && x.qubits == y.qubits && x.modes == y.modes;
}

std::vector<Branch> merge_duplicates(std::vector<Branch> branches) {
    std::vector<Branch> out;
    for (auto &b : branches) {
        auto it = std::find_if(out.begin(), out.end(), [&](const Branch &o) { return same_kets(o, b); });
        if (it != out.end()) {
            it->amplitude += b.amplitude;
        } else {
            out.push_back(std::move(b));
        }
    }
    std::erase_if(out, [](const Branch &b) { return b.amplitude == Complex{0.0, 0.0}; });
    return out;
}

RegisterLayout without_mode(RegisterLayout layout, std::size_t mode) {
    layout.mode_names.erase(layout.mode_names.begin() + static_cast<std::ptrdiff_t>(mode));
    return layout;
}

/// Probe amplitudes must be +-A with A real.
struct ProbeReadout {
    std::size_t mode = 0;
    double magnitude = 0.0;
    double log_c = 0.0;
    bool degenerate = false;
    std::vector<Sign> signs;
};

ProbeReadout read_probe(const BranchState &state, std::string_view probe_name) {
    ProbeReadout r;
    r.mode = state.layout().mode_index(probe_name);
    if (probe_name == kCounterMode) {
        throw std::invalid_argument("the counter cannot be measured as a probe");
    }
    for (const auto &b : state.branches()) {
        r.magnitude = std::max(r.magnitude, std::abs(b.modes[r.mode].value));
    }
    const double tol = 1e-9 * std::max(1.0, r.magnitude);
    for (const auto &b : state.branches()) {
        const Complex v = b.modes[r.mode].value;
        if (std::abs(v.imag()) > tol || std::abs(std::abs(v.real()) - r.magnitude) > tol) {
            throw std::invalid_argument("probe '" + std::string(probe_name) +
                                        "' does not carry two opposite real amplitudes");
        }
        r.signs.push_back(v.real() >= 0.0 ? Sign::plus : Sign::minus);
    }
    r.log_c = coherent_overlap(CoherentAmplitude{r.magnitude}, CoherentAmplitude{-r.magnitude}).log_magnitude;
    r.degenerate = std::exp(r.log_c) >= 1.0 - kDegenerateOverlapTol;
    return r;
}

double log_weight(const LogProjectionAmplitudes &amps, Sign branch_sign, Sign outcome) {
    return branch_sign == outcome ? amps.same_sign : amps.opposite_sign;
}

BranchState project_probe(const BranchState &state, const ProbeReadout &r, Sign outcome) {
    std::vector<Branch> branches = state.branches();
    if (!r.degenerate) {
        const auto amps = log_projection_amplitudes(r.log_c);
        // Rescale in log domain so a uniformly tiny conditional state survives.
        double peak = -std::numeric_limits<double>::infinity();
        std::vector<double> logs(branches.size());
        for (std::size_t i = 0; i < branches.size(); ++i) {
            logs[i] = std::log(std::abs(branches[i].amplitude)) + log_weight(amps, r.signs[i], outcome);
            peak = std::max(peak, logs[i]);
        }
        if (!std::isfinite(peak)) {
            throw std::domain_error("probe outcome has zero amplitude");
        }
        for (std::size_t i = 0; i < branches.size(); ++i) {
            const Complex unit = branches[i].amplitude / std::abs(branches[i].amplitude);
            branches[i].amplitude = unit * std::exp(logs[i] - peak);
        }
        std::erase_if(branches, [](const Branch &b) { return b.amplitude == Complex{0.0, 0.0}; });
    }
    for (auto &b : branches) {
        b.modes.erase(b.modes.begin() + static_cast<std::ptrdiff_t>(r.mode));
    }
    renormalize(branches);
    return BranchStateAccess::make(without_mode(state.layout(), r.mode), std::move(branches), state);
}

std::vector<bool> qubit_mask(const BranchState &state, std::span<const std::size_t> qubits) {
    std::vector<bool> mask(state.layout().qubit_labels.size(), false);
    for (std::size_t q : qubits) {
        mask[q] = true;
    }
    return mask;
}

BranchState keep_spin(const BranchState &state, std::size_t q, Spin spin) {
    std::vector<Branch> kept;
    for (const auto &b : state.branches()) {
        if (b.qubits[q] == spin) {
            kept.push_back(b);
        }
    }
    if (kept.empty()) {
        throw std::domain_error("spin outcome has zero probability");
    }
    renormalize(kept);
    return BranchStateAccess::make(state.layout(), std::move(kept), state);
}

BranchState project_bell(const BranchState &state, std::size_t qa, std::size_t qb, BellOutcome outcome) {
    const auto v = bell_vector(outcome);
    std::vector<Branch> out;
    for (const auto &b : state.branches()) {
        const std::size_t idx = 2 * static_cast<std::size_t>(b.qubits[qa]) + static_cast<std::size_t>(b.qubits[qb]);
        const Complex coeff = std::conj(v[idx]) * b.amplitude;
        if (coeff == Complex{0.0, 0.0}) {
            continue;
        }
        for (std::size_t x = 0; x < 4; ++x) {
            if (v[x] == Complex{0.0, 0.0}) {
                continue;
            }
            Branch nb = b;
            nb.qubits[qa] = static_cast<Spin>(x >> 1);
            nb.qubits[qb] = static_cast<Spin>(x & 1);
            nb.amplitude = v[x] * coeff;
            out.push_back(std::move(nb));
        }
    }
    out = merge_duplicates(std::move(out));
    if (out.empty()) {
        throw std::domain_error("Bell outcome has zero probability");
    }
    renormalize(out);
    return BranchStateAccess::make(state.layout(), std::move(out), state);
}

void require_normalized(Complex a, Complex b) {
    if (std::abs(std::norm(a) + std::norm(b) - 1.0) > kNormTol) {
        throw std::invalid_argument("qubit amplitudes must satisfy |a|^2 + |b|^2 = 1");
    }
}

}  // namespace

std::size_t RegisterLayout::qubit_index(std::string_view name) const {
    auto it = std::find(qubit_labels.begin(), qubit_labels.end(), name);
    if (it == qubit_labels.end()) {
        throw std::invalid_argument("unknown qubit '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - qubit_labels.begin());
}

std::optional<std::size_t> RegisterLayout::find_mode(std::string_view name) const {
    auto it = std::find(mode_names.begin(), mode_names.end(), name);
    if (it == mode_names.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - mode_names.begin());
}

std::size_t RegisterLayout::mode_index(std::string_view name) const {
    auto idx = find_mode(name);
    if (!idx) {
        throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
    }
    return *idx;
}

BranchState::BranchState(RegisterLayout layout, std::vector<Branch> branches)
    : layout_(std::move(layout)), branches_(std::move(branches)) {
    auto unique = [](std::vector<std::string> names) {
        std::sort(names.begin(), names.end());
        return std::adjacent_find(names.begin(), names.end()) == names.end();
    };
    if (!unique(layout_.qubit_labels) || !unique(layout_.mode_names)) {
        throw std::invalid_argument("register names must be unique");
    }
    for (const auto &b : branches_) {
        if (b.qubits.size() != layout_.qubit_labels.size() || b.modes.size() != layout_.mode_names.size()) {
            throw std::invalid_argument("branch does not match register layout");
        }
    }
}

double BranchState::norm_squared() const { return gram_norm_squared(branches_); }

BranchState prepare_single_qubit(Complex a, Complex b) {
    require_normalized(a, b);
    RegisterLayout layout{{"q"}, 0, {std::string(kCounterMode)}};
    std::vector<Branch> branches;
    if (a != Complex{0.0, 0.0}) {
        branches.push_back(Branch{a, {Spin::down}, QutritLabel::ready, {CoherentAmplitude{}}});
    }
    if (b != Complex{0.0, 0.0}) {
        branches.push_back(Branch{b, {Spin::up}, QutritLabel::ready, {CoherentAmplitude{}}});
    }
    return BranchState(std::move(layout), std::move(branches));
}

BranchState prepare_bell_pair() {
    const double h = std::numbers::sqrt2 / 2.0;
    RegisterLayout layout{{"A", "B"}, 0, {std::string(kCounterMode)}};
    std::vector<Branch> branches{
        Branch{h, {Spin::up, Spin::up}, QutritLabel::ready, {CoherentAmplitude{}}},
        Branch{h, {Spin::down, Spin::down}, QutritLabel::ready, {CoherentAmplitude{}}},
    };
    return BranchState(std::move(layout), std::move(branches));
}

BranchState apply_premeasurement(const BranchState &state, const ModelParams &params, std::string_view qubit) {
    params.validate();
    if (state.measured_qubit()) {
        throw std::logic_error("qutrits are not ready: state was already pre-measured");
    }
    const std::size_t q = state.layout().qubit_index(qubit);
    const std::size_t counter = state.layout().mode_index(kCounterMode);
    const double kick = params.kick();
    std::vector<Branch> branches = state.branches();
    for (auto &b : branches) {
        if (b.qutrits != QutritLabel::ready || b.modes[counter].value != Complex{0.0, 0.0}) {
            throw std::logic_error("pre-measurement needs ready qutrits and a counter at rest");
        }
        const bool up = b.qubits[q] == Spin::up;
        b.qutrits = up ? QutritLabel::all_u : QutritLabel::all_d;
        b.modes[counter] = CoherentAmplitude{up ? kick : -kick};
    }
    RegisterLayout layout = state.layout();
    layout.n_qutrits = params.n_qutrits;
    BranchState out = BranchStateAccess::make(std::move(layout), std::move(branches), state);
    BranchStateAccess::set_measured_qubit(out, q);
    return out;
}

BranchState apply_premeasurement(const BranchState &state, const ModelParams &params) {
    if (state.layout().qubit_labels.size() != 1) {
        throw std::invalid_argument("name the qubit to pre-measure when several are present");
    }
    return apply_premeasurement(state, params, state.layout().qubit_labels.front());
}

BranchState evolve_counter_phase(const BranchState &state, double t, const ModelParams &params) {
    const std::size_t counter = state.layout().mode_index(kCounterMode);
    const Complex rot = std::polar(1.0, -params.omega * t);
    std::vector<Branch> branches = state.branches();
    for (auto &b : branches) {
        b.modes[counter] = CoherentAmplitude{b.modes[counter].value * rot};
    }
    return BranchStateAccess::make(state.layout(), std::move(branches), state);
}

BranchState tap_probe(const BranchState &state, double eta_k, std::string_view probe_name) {
    if (!(eta_k >= 0.0 && eta_k <= 1.0)) {
        throw std::invalid_argument("tap fraction must lie in [0, 1]");
    }
    if (state.layout().find_mode(probe_name)) {
        throw std::invalid_argument("mode '" + std::string(probe_name) + "' already exists");
    }
    const double remaining = 1.0 - state.tapped_fraction();
    if (eta_k > remaining + 1e-12) {
        throw std::invalid_argument("total tapped fraction would exceed 1");
    }
    const double ratio = remaining > 0.0 ? std::min(1.0, eta_k / remaining) : 0.0;
    const double keep = std::sqrt(1.0 - ratio);
    const double give = std::sqrt(ratio);
    const std::size_t counter = state.layout().mode_index(kCounterMode);

    std::vector<Branch> branches = state.branches();
    for (auto &b : branches) {
        const Complex alpha = b.modes[counter].value;
        b.modes[counter] = CoherentAmplitude{keep * alpha};
        b.modes.emplace_back(give * alpha);
    }
    RegisterLayout layout = state.layout();
    layout.mode_names.emplace_back(probe_name);
    BranchState out = BranchStateAccess::make(std::move(layout), std::move(branches), state);
    BranchStateAccess::set_tapped_fraction(out, std::min(1.0, state.tapped_fraction() + eta_k));
    return out;
}

ProbeProbabilities probe_outcome_probabilities(const BranchState &state, std::string_view probe_name) {
    const ProbeReadout r = read_probe(state, probe_name);
    if (r.degenerate) {
        return ProbeProbabilities{0.5, 0.5, true};
    }
    const auto amps = log_projection_amplitudes(r.log_c);
    const auto &branches = state.branches();
    const double n2 = gram_norm_squared(branches);
    std::array<double, 2> p{};
    for (Sign s : {Sign::plus, Sign::minus}) {
        double total = 0.0;
        for (std::size_t i = 0; i < branches.size(); ++i) {
            const Complex ai = branches[i].amplitude * std::exp(log_weight(amps, r.signs[i], s));
            for (std::size_t j = 0; j < branches.size(); ++j) {
                const Complex aj = branches[j].amplitude * std::exp(log_weight(amps, r.signs[j], s));
                total += (std::conj(ai) * aj * rest_overlap(branches[i], branches[j], nullptr, r.mode)).real();
            }
        }
        p[static_cast<std::size_t>(s)] = total / n2;
    }
    return ProbeProbabilities{p[0], p[1], false};
}

std::pair<MeasurementOutcome, BranchState> measure_probe(const BranchState &state, std::string_view probe_name,
                                                          Rng &rng) {
    const ProbeProbabilities p = probe_outcome_probabilities(state, probe_name);
    const Sign s = rng.uniform() < p.plus ? Sign::plus : Sign::minus;
    return measure_probe_forced(state, probe_name, s);
}

std::pair<MeasurementOutcome, BranchState> measure_probe_forced(const BranchState &state, std::string_view probe_name,
                                                                 Sign outcome) {
    const ProbeReadout r = read_probe(state, probe_name);
    const ProbeProbabilities p = probe_outcome_probabilities(state, probe_name);
    return {MeasurementOutcome{outcome, p.of(outcome)}, project_probe(state, r, outcome)};
}

BranchState apply_reversal(const BranchState &state, const ModelParams &params, ReversalMode mode) {
    if (!state.measured_qubit()) {
        throw std::logic_error("reversal called before pre-measurement");
    }
    const std::size_t counter = state.layout().mode_index(kCounterMode);
    const double bob_residual = std::sqrt(std::max(0.0, 1.0 - params.bob_eta)) * params.kick();
    std::vector<Branch> branches = state.branches();
    for (auto &b : branches) {
        if (b.qutrits == QutritLabel::ready) {
            throw std::logic_error("reversal needs qutrits in |d> or |u>");
        }
        if (mode == ReversalMode::knows_total_tap) {
            b.modes[counter] = CoherentAmplitude{};
        } else {
            const double shift = b.qutrits == QutritLabel::all_u ? bob_residual : -bob_residual;
            b.modes[counter] = CoherentAmplitude{b.modes[counter].value - shift};
        }
        b.qutrits = QutritLabel::ready;
    }
    return BranchStateAccess::make(state.layout(), merge_duplicates(std::move(branches)), state);
}

std::array<double, 2> spin_probabilities(const BranchState &state, std::string_view qubit) {
    const auto rho = reduced_density_matrix(state, std::vector<std::string>{std::string(qubit)});
    return {rho[0].real(), rho[3].real()};
}

std::pair<SpinOutcome, BranchState> measure_qubit_spin(const BranchState &state, std::string_view qubit, Rng &rng) {
    const auto p = spin_probabilities(state, qubit);
    const Spin s = rng.uniform() < p[0] ? Spin::down : Spin::up;
    return measure_qubit_spin_forced(state, qubit, s);
}

std::pair<SpinOutcome, BranchState> measure_qubit_spin_forced(const BranchState &state, std::string_view qubit,
                                                               Spin outcome) {
    const auto p = spin_probabilities(state, qubit);
    const std::size_t q = state.layout().qubit_index(qubit);
    return {SpinOutcome{outcome, p[static_cast<std::size_t>(outcome)]}, keep_spin(state, q, outcome)};
}

std::array<Complex, 4> bell_vector(BellOutcome outcome) {
    // Index 2*A + B with up = 1: 0 = dd, 1 = du, 2 = ud, 3 = uu.
    const double h = std::numbers::sqrt2 / 2.0;
    switch (outcome) {
        case BellOutcome::psi_plus:
            return {h, 0.0, 0.0, h};
        case BellOutcome::psi_minus:
            return {-h, 0.0, 0.0, h};
        case BellOutcome::phi_plus:
            return {0.0, h, h, 0.0};
        case BellOutcome::phi_minus:
            return {0.0, -h, h, 0.0};
    }
    throw std::invalid_argument("bad Bell outcome");
}

std::array<double, 4> bell_probabilities(const BranchState &state, std::string_view qubit_a,
                                         std::string_view qubit_b) {
    const auto rho = reduced_density_matrix(state, std::vector<std::string>{std::string(qubit_a), std::string(qubit_b)});
    std::array<double, 4> p{};
    for (std::size_t k = 0; k < 4; ++k) {
        const auto v = bell_vector(static_cast<BellOutcome>(k));
        Complex acc{0.0, 0.0};
        for (std::size_t x = 0; x < 4; ++x) {
            for (std::size_t y = 0; y < 4; ++y) {
                acc += std::conj(v[x]) * rho[4 * x + y] * v[y];
            }
        }
        p[k] = acc.real();
    }
    return p;
}

std::pair<BellResult, BranchState> measure_bell(const BranchState &state, std::string_view qubit_a,
                                                std::string_view qubit_b, Rng &rng) {
    const auto p = bell_probabilities(state, qubit_a, qubit_b);
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t k = 0;
    for (; k < 3; ++k) {
        cumulative += p[k];
        if (u < cumulative) {
            break;
        }
    }
    return measure_bell_forced(state, qubit_a, qubit_b, static_cast<BellOutcome>(k));
}

std::pair<BellResult, BranchState> measure_bell_forced(const BranchState &state, std::string_view qubit_a,
                                                       std::string_view qubit_b, BellOutcome outcome) {
    const auto p = bell_probabilities(state, qubit_a, qubit_b);
    const std::size_t qa = state.layout().qubit_index(qubit_a);
    const std::size_t qb = state.layout().qubit_index(qubit_b);
    if (qa == qb) {
        throw std::invalid_argument("Bell measurement needs two distinct qubits");
    }
    return {BellResult{outcome, p[static_cast<std::size_t>(outcome)]}, project_bell(state, qa, qb, outcome)};
}

double fidelity_with_bell(const BranchState &state, std::string_view qubit_a, std::string_view qubit_b) {
    return bell_probabilities(state, qubit_a, qubit_b)[static_cast<std::size_t>(BellOutcome::psi_plus)];
}

std::vector<Complex> reduced_density_matrix(const BranchState &state, std::span<const std::string> qubits) {
    std::vector<std::size_t> idx;
    for (const auto &name : qubits) {
        idx.push_back(state.layout().qubit_index(name));
    }
    const std::vector<bool> mask = qubit_mask(state, idx);
    const std::size_t k = idx.size();
    const std::size_t dim = std::size_t{1} << k;
    auto basis_index = [&](const Branch &b) {
        std::size_t x = 0;
        for (std::size_t i = 0; i < k; ++i) {
            x = (x << 1) | static_cast<std::size_t>(b.qubits[idx[i]]);
        }
        return x;
    };
    const auto &branches = state.branches();
    const double n2 = gram_norm_squared(branches);
    std::vector<Complex> rho(dim * dim, Complex{0.0, 0.0});
    for (const auto &bi : branches) {
        for (const auto &bj : branches) {
            const Complex term = bi.amplitude * std::conj(bj.amplitude) * rest_overlap(bj, bi, &mask);
            rho[dim * basis_index(bi) + basis_index(bj)] += term / n2;
        }
    }
    return rho;
}

double state_overlap_squared(const BranchState &a, const BranchState &b) {
    if (a.layout().qubit_labels != b.layout().qubit_labels || a.layout().mode_names != b.layout().mode_names) {
        throw std::invalid_argument("states have different register layouts");
    }
    Complex acc{0.0, 0.0};
    for (const auto &x : a.branches()) {
        for (const auto &y : b.branches()) {
            acc += std::conj(x.amplitude) * y.amplitude * rest_overlap(x, y);
        }
    }
    return std::norm(acc) / (a.norm_squared() * b.norm_squared());
}

}  // namespace qrev
