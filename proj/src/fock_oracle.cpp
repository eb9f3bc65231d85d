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

#include "qrev/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace qrev::oracle {

namespace {

constexpr double kMaxLeakage = 1e-8;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<std::size_t> strides_of(const std::vector<int> &dims) {
    std::vector<std::size_t> s(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) {
        s[k - 1] = s[k] * static_cast<std::size_t>(dims[k]);
    }
    return s;
}

/// Applies `m` along `axis` on every fibre whose multi-index satisfies `pred`.
template <class Pred>
void apply_axis(DenseState &st, std::size_t axis, const Eigen::MatrixXcd &m, Pred pred) {
    const auto strides = strides_of(st.dims);
    const auto d = static_cast<std::size_t>(st.dims[axis]);
    const std::size_t inner = strides[axis];
    const std::size_t outer = st.amplitudes.size() / (d * inner);
    auto digit = [&](std::size_t flat, std::size_t k) { return (flat / strides[k]) % static_cast<std::size_t>(st.dims[k]); };
    Eigen::VectorXcd fibre(static_cast<Eigen::Index>(d));
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
            const std::size_t base = o * d * inner + in;
            if (!pred([&](std::size_t k) { return digit(base, k); })) {
                continue;
            }
            for (std::size_t j = 0; j < d; ++j) {
                fibre[static_cast<Eigen::Index>(j)] = st.amplitudes[base + j * inner];
            }
            const Eigen::VectorXcd out = m * fibre;
            for (std::size_t j = 0; j < d; ++j) {
                st.amplitudes[base + j * inner] = out[static_cast<Eigen::Index>(j)];
            }
        }
    }
}

Eigen::MatrixXcd trit_swap(Trit a, Trit b) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(3, 3);
    p.row(static_cast<int>(a)).swap(p.row(static_cast<int>(b)));
    return p;
}

/// Basis of the block with n quanta: counter count i in [lo, hi].
struct Block {
    int n = 0;
    int lo = 0;
    int hi = -1;
    Eigen::MatrixXcd u;
};

std::vector<Block> beamsplitter_blocks(double ratio, int dc, int dp) {
    const double theta = std::asin(std::sqrt(std::clamp(ratio, 0.0, 1.0)));
    std::vector<Block> blocks;
    for (int n = 0; n <= (dc - 1) + (dp - 1); ++n) {
        Block b;
        b.n = n;
        b.lo = std::max(0, n - (dp - 1));
        b.hi = std::min(n, dc - 1);
        const int size = b.hi - b.lo + 1;
        // A = b^dag a maps |i, n-i> -> sqrt(i (n-i+1)) |i-1, n-i+1>.
        Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(size, size);
        for (int i = b.lo + 1; i <= b.hi; ++i) {
            const double v = theta * std::sqrt(static_cast<double>(i) * (n - i + 1));
            gen(i - 1 - b.lo, i - b.lo) += v;
            gen(i - b.lo, i - 1 - b.lo) -= v;
        }
        b.u = gen.exp();
        blocks.push_back(std::move(b));
    }
    return blocks;
}

void apply_beamsplitter(DenseState &st, std::size_t ca, std::size_t pa, double ratio) {
    const int dc = st.dims[ca];
    const int dp = st.dims[pa];
    const auto blocks = beamsplitter_blocks(ratio, dc, dp);
    const auto strides = strides_of(st.dims);
    const std::size_t sc = strides[ca];
    const std::size_t sp = strides[pa];
    for (std::size_t flat = 0; flat < st.amplitudes.size(); ++flat) {
        if ((flat / sc) % static_cast<std::size_t>(dc) != 0 || (flat / sp) % static_cast<std::size_t>(dp) != 0) {
            continue;
        }
        for (const auto &b : blocks) {
            const int size = b.hi - b.lo + 1;
            Eigen::VectorXcd v(size);
            for (int i = b.lo; i <= b.hi; ++i) {
                v[i - b.lo] = st.amplitudes[flat + static_cast<std::size_t>(i) * sc +
                                            static_cast<std::size_t>(b.n - i) * sp];
            }
            const Eigen::VectorXcd out = b.u * v;
            for (int i = b.lo; i <= b.hi; ++i) {
                st.amplitudes[flat + static_cast<std::size_t>(i) * sc + static_cast<std::size_t>(b.n - i) * sp] =
                    out[i - b.lo];
            }
        }
    }
}

/// Contracts `axis` with <v| and drops it.
DenseState project_axis(const DenseState &st, std::size_t axis, const Eigen::VectorXcd &v) {
    DenseState out;
    out.axes = st.axes;
    out.dims = st.dims;
    out.axes.erase(out.axes.begin() + static_cast<std::ptrdiff_t>(axis));
    out.dims.erase(out.dims.begin() + static_cast<std::ptrdiff_t>(axis));
    const auto strides = strides_of(st.dims);
    const auto d = static_cast<std::size_t>(st.dims[axis]);
    const std::size_t inner = strides[axis];
    const std::size_t outer = st.amplitudes.size() / (d * inner);
    out.amplitudes.assign(outer * inner, Complex{0.0, 0.0});
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
            Complex acc{0.0, 0.0};
            for (std::size_t j = 0; j < d; ++j) {
                acc += std::conj(v[static_cast<Eigen::Index>(j)]) * st.amplitudes[o * d * inner + j * inner + in];
            }
            out.amplitudes[o * inner + in] = acc;
        }
    }
    return out;
}

void scale(DenseState &st, double factor) {
    for (auto &a : st.amplitudes) {
        a *= factor;
    }
}

/// Optimal projectors for |+A> vs |-A>: eigenvectors of |a><a| - |b><b|
/// restricted to span{a, b}. Returns {|+>, |->}, or nullopt when a ~ b.
std::optional<std::array<Eigen::VectorXcd, 2>> helstrom_vectors(double amplitude, int d) {
    const Eigen::VectorXcd a = coherent_vector(amplitude, d);
    const Eigen::VectorXcd b = coherent_vector(-amplitude, d);
    const Complex ab = a.dot(b);
    if (std::abs(ab) >= 1.0 - kDegenerateOverlapTol) {
        return std::nullopt;
    }
    const Eigen::VectorXcd e1 = a;
    Eigen::VectorXcd e2 = b - ab * a;
    e2.normalize();
    Eigen::Vector2cd ua(1.0, 0.0);
    Eigen::Vector2cd ub(e1.dot(b), e2.dot(b));
    const Eigen::Matrix2cd gamma = ua * ua.adjoint() - ub * ub.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(gamma);
    const Eigen::Vector2cd minus = solver.eigenvectors().col(0);
    const Eigen::Vector2cd plus = solver.eigenvectors().col(1);
    return std::array<Eigen::VectorXcd, 2>{plus[0] * e1 + plus[1] * e2, minus[0] * e1 + minus[1] * e2};
}

class Runner {
   public:
    Runner(const Scenario &sc, Rng &rng) : sc_(sc), rng_(rng) {
        const ModelParams &p = sc.params;
        p.validate();
        if (p.n_qutrits > 3 || p.kick() > 2.0 + 1e-12) {
            throw std::invalid_argument("oracle supports N <= 3 and N*epsilon <= 2");
        }
        state_.axes = {"A", "B"};
        state_.dims = {2, 2};
        for (int j = 0; j < p.n_qutrits; ++j) {
            state_.axes.push_back("t" + std::to_string(j));
            state_.dims.push_back(3);
        }
        add_mode(std::string(kCounterMode), p.kick());
        for (const auto &step : sc.steps) {
            if (const auto *tap = std::get_if<Tap>(&step)) {
                add_mode(tap->probe, std::sqrt(tap->eta) * p.kick());
            }
        }
        const std::size_t total = std::accumulate(state_.dims.begin(), state_.dims.end(), std::size_t{1},
                                                  [](std::size_t acc, int d) { return acc * static_cast<std::size_t>(d); });
        state_.amplitudes.assign(total, Complex{0.0, 0.0});
        // A, B are the two leading axes; every other register starts at index 0.
        const std::size_t rest = total / 4;
        for (std::size_t x = 0; x < 4; ++x) {
            state_.amplitudes[x * rest] = sc.initial_ab[x];
        }
        const double n2 = state_.norm_squared();
        if (std::abs(n2 - 1.0) > 1e-9) {
            throw std::invalid_argument("initial (A, B) amplitudes must be normalized");
        }
    }

    OracleResult run() {
        for (const auto &step : sc_.steps) {
            std::visit(Overloaded{
                           [&](const Premeasure &) { premeasure(); },
                           [&](const Tap &t) { tap(t); },
                           [&](const MeasureProbe &m) { measure(m); },
                           [&](const Reverse &r) { reverse(r); },
                       },
                       step);
        }
        return finish();
    }

   private:
    void add_mode(const std::string &name, double alpha) {
        const int d = cutoff_for(alpha);
        if (coherent_tail_weight(alpha, d) > kMaxLeakage) {
            throw CutoffError("cutoff " + std::to_string(d) + " too small for amplitude " + std::to_string(alpha));
        }
        state_.axes.push_back(name);
        state_.dims.push_back(d);
    }

    std::size_t b_axis() const { return 1; }

    void conditional_trit_swaps(std::size_t trit_axis) {
        const std::size_t qb = b_axis();
        apply_axis(state_, trit_axis, trit_swap(Trit::r, Trit::u), [&](auto digit) { return digit(qb) == 1; });
        apply_axis(state_, trit_axis, trit_swap(Trit::r, Trit::d), [&](auto digit) { return digit(qb) == 0; });
    }

    void counter_kicks(std::size_t trit_axis, double up_shift, double down_shift) {
        const std::size_t c = state_.axis(std::string(kCounterMode));
        const int dc = state_.dims[c];
        const auto up = displacement_matrix(up_shift, dc);
        const auto down = displacement_matrix(down_shift, dc);
        apply_axis(state_, c, up, [&](auto digit) { return digit(trit_axis) == static_cast<std::size_t>(Trit::u); });
        apply_axis(state_, c, down, [&](auto digit) { return digit(trit_axis) == static_cast<std::size_t>(Trit::d); });
    }

    void premeasure() {
        const double eps = sc_.params.epsilon;
        for (int j = 0; j < sc_.params.n_qutrits; ++j) {
            const std::size_t t = state_.axis("t" + std::to_string(j));
            conditional_trit_swaps(t);
            counter_kicks(t, eps, -eps);
        }
    }

    void tap(const Tap &t) {
        const double remaining = 1.0 - tapped_;
        if (t.eta > remaining + 1e-12) {
            throw std::invalid_argument("total tapped fraction would exceed 1");
        }
        const double ratio = remaining > 0.0 ? std::min(1.0, t.eta / remaining) : 0.0;
        apply_beamsplitter(state_, state_.axis(std::string(kCounterMode)), state_.axis(t.probe), ratio);
        tapped_ = std::min(1.0, tapped_ + t.eta);
        probe_amplitude_[t.probe] = std::sqrt(t.eta) * sc_.params.kick();
    }

    void measure(const MeasureProbe &m) {
        const std::size_t axis = state_.axis(m.probe);
        const int d = state_.dims[axis];
        const double total = state_.norm_squared();
        TraceEntry entry;
        entry.probe = m.probe;
        const auto vectors = helstrom_vectors(probe_amplitude_.at(m.probe), d);
        std::array<DenseState, 2> projected;
        if (vectors) {
            for (std::size_t s = 0; s < 2; ++s) {
                projected[s] = project_axis(state_, axis, (*vectors)[s]);
                entry.outcome_probabilities[s] = projected[s].norm_squared() / total;
            }
        } else {
            const DenseState kept = project_axis(state_, axis, coherent_vector(probe_amplitude_.at(m.probe), d));
            projected = {kept, kept};
            entry.outcome_probabilities = {0.5, 0.5};
        }
        entry.sign = m.forced ? *m.forced : (rng_.uniform() < entry.outcome_probabilities[0] ? Sign::plus : Sign::minus);
        entry.probability = entry.outcome_probabilities[static_cast<std::size_t>(entry.sign)];
        state_ = std::move(projected[static_cast<std::size_t>(entry.sign)]);
        const double n2 = state_.norm_squared();
        if (!(n2 > 0.0)) {
            throw std::domain_error("forced outcome has zero probability");
        }
        scale(state_, 1.0 / std::sqrt(n2));
        trace_.push_back(entry);
    }

    void reverse(const Reverse &r) {
        const ModelParams &p = sc_.params;
        const double residual = r.mode == ReversalMode::knows_total_tap ? std::sqrt(std::max(0.0, 1.0 - tapped_))
                                                                        : std::sqrt(1.0 - p.bob_eta);
        const double shift = residual * p.epsilon;
        for (int j = 0; j < p.n_qutrits; ++j) {
            const std::size_t t = state_.axis("t" + std::to_string(j));
            counter_kicks(t, -shift, shift);
            conditional_trit_swaps(t);
        }
    }

    OracleResult finish() {
        OracleResult out;
        out.trace = trace_;
        const double n2 = state_.norm_squared();
        const std::size_t rest = state_.amplitudes.size() / 4;
        for (std::size_t x = 0; x < 4; ++x) {
            for (std::size_t y = 0; y < 4; ++y) {
                Complex acc{0.0, 0.0};
                for (std::size_t k = 0; k < rest; ++k) {
                    acc += state_.amplitudes[x * rest + k] * std::conj(state_.amplitudes[y * rest + k]);
                }
                out.rho_ab[4 * x + y] = acc / n2;
            }
        }
        const double h = std::numbers::sqrt2 / 2.0;
        const std::array<double, 4> psi_plus{h, 0.0, 0.0, h};
        Complex f{0.0, 0.0};
        for (std::size_t x = 0; x < 4; ++x) {
            for (std::size_t y = 0; y < 4; ++y) {
                f += psi_plus[x] * out.rho_ab[4 * x + y] * psi_plus[y];
            }
        }
        out.fidelity = f.real();
        out.state = std::move(state_);
        return out;
    }

    const Scenario &sc_;
    Rng &rng_;
    DenseState state_;
    double tapped_ = 0.0;
    std::map<std::string, double> probe_amplitude_;
    std::vector<TraceEntry> trace_;
};

}  // namespace

int cutoff_for(double alpha) {
    const double a = std::abs(alpha);
    return static_cast<int>(std::ceil(a * a + 8.0 * a + 16.0));
}

double coherent_tail_weight(double alpha, int d) {
    const double mean = alpha * alpha;
    double term = std::exp(-mean);
    double sum = 0.0;
    for (int n = 0; n < d; ++n) {
        sum += term;
        term *= mean / (n + 1);
    }
    return std::max(0.0, 1.0 - sum);
}

Eigen::MatrixXcd displacement_matrix(double alpha, int d) {
    Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 0; n + 1 < d; ++n) {
        const double v = alpha * std::sqrt(static_cast<double>(n + 1));
        gen(n + 1, n) = v;
        gen(n, n + 1) = -v;
    }
    return gen.exp();
}

Eigen::MatrixXcd beamsplitter_matrix(double ratio, int dc, int dp) {
    const double theta = std::asin(std::sqrt(std::clamp(ratio, 0.0, 1.0)));
    const int dim = dc * dp;
    Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 1; i < dc; ++i) {
        for (int j = 0; j + 1 < dp; ++j) {
            const double v = theta * std::sqrt(static_cast<double>(i) * (j + 1));
            gen((i - 1) * dp + (j + 1), i * dp + j) += v;
            gen(i * dp + j, (i - 1) * dp + (j + 1)) -= v;
        }
    }
    return gen.exp();
}

Eigen::VectorXcd coherent_vector(double alpha, int d) {
    Eigen::VectorXcd v(d);
    double term = std::exp(-0.5 * alpha * alpha);
    for (int n = 0; n < d; ++n) {
        v[n] = term;
        term *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    v.normalize();
    return v;
}

std::size_t DenseState::axis(const std::string &name) const {
    auto it = std::find(axes.begin(), axes.end(), name);
    if (it == axes.end()) {
        throw std::invalid_argument("unknown oracle register '" + name + "'");
    }
    return static_cast<std::size_t>(it - axes.begin());
}

double DenseState::norm_squared() const {
    double total = 0.0;
    for (const auto &a : amplitudes) {
        total += std::norm(a);
    }
    return total;
}

std::array<Complex, 4> bell_initial() {
    const double h = std::numbers::sqrt2 / 2.0;
    return {h, 0.0, 0.0, h};
}

std::array<Complex, 4> single_qubit_initial(Complex a, Complex b) { return {a, b, 0.0, 0.0}; }

std::vector<Step> standard_script(const ModelParams &params, std::optional<Sign> bob_outcome, ReversalMode mode) {
    std::vector<Step> steps{Premeasure{}};
    for (std::size_t k = 0; k < params.other_etas.size(); ++k) {
        steps.emplace_back(Tap{params.other_etas[k], "observer" + std::to_string(k + 2)});
    }
    steps.emplace_back(Tap{params.bob_eta, "bob"});
    steps.emplace_back(MeasureProbe{"bob", bob_outcome});
    steps.emplace_back(Reverse{mode});
    return steps;
}

OracleResult oracle_run(const Scenario &scenario, Rng &rng) { return Runner(scenario, rng).run(); }

}  // namespace qrev::oracle
