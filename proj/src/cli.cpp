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

#include "qrev/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qrev/analysis.hpp"
#include "qrev/branch_engine.hpp"
#include "qrev/coherent.hpp"
#include "qrev/fock_oracle.hpp"
#include "qrev/rng.hpp"

namespace qrev::cli {

namespace {

using nlohmann::ordered_json;

const std::vector<double> kFigureK{1.0, 10.0, 100.0};

std::vector<double> unit_grid(int n) {
    if (n < 2) {
        throw std::invalid_argument("grid size must be at least 2");
    }
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
    }
    return g;
}

double d_rev_on_curve(double k, double d_rel) { return std::sqrt(std::max(0.0, (1.0 - d_rel) * (1.0 + d_rel)) / k); }

std::string k_label(double k) { return fmt::format("K{}", static_cast<int>(k)); }

void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    f << content;
    f.close();
    if (!f) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

// z-score with the closed-form binomial sigma, so that a rate of exactly 0 or 1
// still gets a finite, meaningful score.
ZScore binomial_z(std::string name, const protocol::RateEstimate &r, double expected, double scale = 1.0) {
    ZScore z;
    z.quantity = std::move(name);
    z.empirical = r.value * scale;
    z.expected = expected * scale;
    if (r.trials == 0) {
        return z;
    }
    z.sigma = scale * std::sqrt(std::max(0.0, expected * (1.0 - expected)) / static_cast<double>(r.trials));
    const double diff = std::abs(z.empirical - z.expected);
    if (z.sigma > 0.0) {
        z.z = diff / z.sigma;
    } else {
        z.z = diff > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return z;
}

ordered_json json_number(double x) {
    // JSON has no infinity; keep the document valid.
    if (!std::isfinite(x)) {
        return nullptr;
    }
    return x;
}

struct OracleCase {
    int n;
    double eps;
    double eta;
    double eta_tilde;
};

std::vector<OracleCase> oracle_grid() {
    std::vector<OracleCase> cases;
    for (int n : {1, 2}) {
        for (double eps : {0.25, 0.5, 1.0}) {
            for (double eta : {0.0, 0.3, 0.7, 1.0}) {
                for (double et : {0.0, 0.2}) {
                    if (eta + et <= 1.0) {
                        cases.push_back({n, eps, eta, et});
                    }
                }
            }
        }
    }
    return cases;
}

double engine_oracle_deviation(const OracleCase &oc, bool inject_fault) {
    ModelParams p;
    p.n_qutrits = oc.n;
    p.epsilon = oc.eps;
    p.bob_eta = oc.eta;
    if (oc.eta_tilde > 0.0) {
        p.other_etas = {oc.eta_tilde};
    }
    const std::vector<std::string> ab{"A", "B"};
    double worst = 0.0;
    for (Sign sign : {Sign::plus, Sign::minus}) {
        Rng rng(0);
        const auto r = oracle::oracle_run({p, oracle::bell_initial(), oracle::standard_script(p, sign)}, rng);

        BranchState s = apply_premeasurement(prepare_bell_pair(), p, "B");
        s = p.other_etas.empty() ? s : tap_probe(s, oc.eta_tilde, "observer2");
        s = tap_probe(s, oc.eta, "bob");
        const auto probs = probe_outcome_probabilities(s, "bob");
        const Sign engine_sign = inject_fault ? (sign == Sign::plus ? Sign::minus : Sign::plus) : sign;
        s = apply_reversal(measure_probe_forced(s, "bob", engine_sign).second, p);

        worst = std::max(worst, std::abs(probs.of(sign) - r.trace.at(0).probability));
        worst = std::max(worst, std::abs(fidelity_with_bell(s) - r.fidelity));
        const auto rho = reduced_density_matrix(s, ab);
        for (std::size_t i = 0; i < 16; ++i) {
            worst = std::max(worst, std::abs(rho[i] - r.rho_ab[i]));
        }
    }
    return worst;
}

CheckResult check(std::string name, bool passed, std::string detail) {
    return CheckResult{std::move(name), passed, std::move(detail)};
}

std::vector<CheckResult> invariant_checks() {
    std::vector<CheckResult> out;
    Rng rng(20260101);

    {
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double c0 = std::exp(-30.0 * rng.uniform()) * (1.0 - 1e-6) + 1e-12;
            const auto t = analysis::tradeoff_point(c0, rng.uniform());
            const double lhs = std::pow(2.0 * t.fidelity - 1.0, 2) + std::pow(1.0 - 2.0 * t.p_error, 2);
            worst = std::max(worst, std::abs(lhs - 1.0));
        }
        out.push_back(check("tradeoff identity, 10^4 samples", worst <= 1e-12, fmt::format("max residual {:.3g}", worst)));
    }
    {
        const double c0 = std::exp(-2.0);
        const auto opt = analysis::optimal_eta(c0);
        const auto found = analysis::golden_section_minimize(
            [c0](long double eta) { return analysis::fine_excess_extended(c0, eta); }, 0.0, 1.0);
        const double target = std::numbers::ln2 / 4.0;
        const bool ok = std::abs(opt.fine_min - (1.0 - std::numbers::sqrt2 / 2.0)) <= 1e-12 &&
                        std::abs(opt.eta_star - target) <= 1e-9 && std::abs(found.x - opt.eta_star) <= 1e-9;
        out.push_back(check("optimal strength vs golden-section search", ok,
                            fmt::format("eta*={:.12f} search={:.12f}", opt.eta_star, found.x)));
    }
    {
        std::vector<double> etas;
        for (int i = 0; i <= 100; ++i) {
            etas.push_back(0.005 * i);
        }
        const auto curve = analysis::multi_observer_curve(std::exp(-2.0), 0.5, etas);
        double worst = 0.0;
        for (const auto &pt : curve.points) {
            worst = std::max(worst, std::abs(curve.k * pt.d_rev * pt.d_rev + pt.d_rel * pt.d_rel - 1.0));
        }
        out.push_back(check("multi-observer identity K d_rev^2 + d_rel^2 = 1", worst <= 1e-12,
                            fmt::format("K={:.6f} max residual {:.3g}", curve.k, worst)));
    }
    {
        bool ok = analysis::mutual_information(0.0) == 1.0 && analysis::mutual_information(0.5) == 0.0;
        double prev = -1.0;
        for (int i = 0; i <= 1000; ++i) {
            const double d_rel = i / 1000.0;
            const double info = analysis::mutual_information(0.5 * (1.0 - d_rel));
            ok = ok && info > prev;
            prev = info;
        }
        out.push_back(check("mutual information endpoints and monotonicity", ok, "1001-point grid"));
    }
    {
        const auto b = analysis::max_observers(std::exp(-50.0), 0.01);
        const bool ok = std::abs(b.m_p - 31.07) < 0.005 &&
                        std::abs(static_cast<double>(b.m_exact) - std::floor(b.m_p)) <= 1.0;
        out.push_back(check("observer bound c0=e^-50 p=0.01", ok, fmt::format("M_p={:.4f} M_exact={}", b.m_p, b.m_exact)));
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double c = rng.uniform() * (1.0 - 2e-9);
            const auto d = make_discrimination(c);
            const auto a = projection_amplitudes(d);
            worst = std::max(worst, std::abs(a.same_sign * a.same_sign + a.opposite_sign * a.opposite_sign - 1.0));
            worst = std::max(worst, std::abs(2.0 * a.same_sign * a.opposite_sign - c));
            worst = std::max(worst, std::abs(a.opposite_sign * a.opposite_sign - d.p_error));
        }
        out.push_back(check("Helstrom amplitude identities", worst <= 1e-12, fmt::format("max residual {:.3g}", worst)));
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 500; ++i) {
            ModelParams p;
            p.n_qutrits = 1 + static_cast<int>(rng.uniform() * 4);
            p.epsilon = 0.05 + 2.0 * rng.uniform();
            p.bob_eta = rng.uniform();
            const double other = (1.0 - p.bob_eta) * rng.uniform();
            if (other > 0.0) {
                p.other_etas = {other};
            }
            auto s = apply_premeasurement(prepare_bell_pair(), p, "B");
            if (other > 0.0) {
                s = tap_probe(s, other, "observer2");
            }
            s = tap_probe(s, p.bob_eta, "bob");
            const auto pp = probe_outcome_probabilities(s, "bob");
            worst = std::max(worst, std::abs(pp.plus + pp.minus - 1.0));
            const Sign sign = rng.bernoulli(0.5) ? Sign::plus : Sign::minus;
            s = apply_reversal(measure_probe_forced(s, "bob", sign).second, p);
            worst = std::max(worst, std::abs(s.norm_squared() - 1.0));
            const auto bp = bell_probabilities(s, "A", "B");
            worst = std::max(worst, std::abs(bp[0] + bp[1] + bp[2] + bp[3] - 1.0));
            const double expected_f = 0.5 * (1.0 + std::exp(p.log_c0() * p.eta_total()));
            worst = std::max(worst, std::abs(fidelity_with_bell(s) - expected_f));
        }
        out.push_back(check("engine norms, completeness and fidelity closed form", worst <= 1e-10,
                            fmt::format("max deviation {:.3g}", worst)));
    }
    {
        ModelParams p;
        p.n_qutrits = 2;
        p.epsilon = 1.0;
        p.bob_eta = 1.0;
        Rng orng(0);
        const auto r = oracle::oracle_run(
            {p, oracle::single_qubit_initial(1.0, 0.0), oracle::standard_script(p, Sign::plus)}, orng);
        const double expected = 0.5 * (1.0 - std::sqrt(1.0 - std::exp(-16.0)));
        const double dev = std::abs(r.trace.at(0).probability - expected);
        out.push_back(check("oracle error probability at c=e^-8", dev <= 1e-8, fmt::format("deviation {:.3g}", dev)));
    }
    return out;
}

std::string observers_text(const std::vector<double> &etas) {
    std::string s;
    for (std::size_t i = 0; i < etas.size(); ++i) {
        s += (i ? "," : "") + format_number(etas[i]);
    }
    return s;
}

}  // namespace

void FigureTable::check() const {
    if (series.size() != columns.size() || series.empty()) {
        throw std::logic_error(name + ": one series per column required");
    }
    for (const auto &s : series) {
        if (s.size() != rows()) {
            throw std::logic_error(name + ": series lengths differ");
        }
    }
    for (std::size_t i = 1; i < rows(); ++i) {
        if (!(series[0][i] > series[0][i - 1])) {
            throw std::logic_error(name + ": grid is not strictly increasing");
        }
    }
}

FigureTable fig3_table(int grid_size) {
    FigureTable t{"fig3_tradeoff", "fig3.csv", {"d_rel"}, {unit_grid(grid_size)}, kFigureK, grid_size};
    for (double k : kFigureK) {
        t.columns.push_back("d_rev_" + k_label(k));
        std::vector<double> col;
        for (double x : t.series[0]) {
            col.push_back(d_rev_on_curve(k, x));
        }
        t.series.push_back(std::move(col));
    }
    t.check();
    return t;
}

FigureTable fig4_table(int grid_size) {
    FigureTable t{"fig4_fine", "fig4.csv", {"d_rel"}, {unit_grid(grid_size)}, kFigureK, grid_size};
    for (double k : kFigureK) {
        t.columns.push_back("fine_" + k_label(k));
        std::vector<double> col;
        for (double x : t.series[0]) {
            col.push_back(1.0 - 0.5 * (d_rev_on_curve(k, x) + x));
        }
        t.series.push_back(std::move(col));
    }
    t.check();
    return t;
}

FigureTable fig5_table(int grid_size) {
    FigureTable t{"fig5_mutual_info", "fig5.csv", {"d_rel", "mutual_info"}, {unit_grid(grid_size)}, {}, grid_size};
    std::vector<double> col;
    for (double x : t.series[0]) {
        col.push_back(analysis::mutual_information(0.5 * (1.0 - x)));
    }
    t.series.push_back(std::move(col));
    t.check();
    return t;
}

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

std::string to_csv(const FigureTable &table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out += (c ? "," : "") + table.columns[c];
    }
    out += '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.series.size(); ++c) {
            out += (c ? "," : "") + format_number(table.series[c][r]);
        }
        out += '\n';
    }
    return out;
}

std::vector<std::filesystem::path> write_figures(const std::filesystem::path &out_dir, int grid_size) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    ordered_json meta;
    meta["schema_version"] = kSchemaVersion;
    meta["parameterization"] = "d_rel";
    meta["grid_size"] = grid_size;
    meta["d_rel_range"] = {0.0, 1.0};
    meta["note"] = "curves depend on (c0, eta, eta_tilde) only through K and d_rel; "
                   "d_rev = sqrt((1 - d_rel^2)/K) is admissible on all of [0, 1] for every K >= 1";
    for (const auto &table : {fig3_table(grid_size), fig4_table(grid_size), fig5_table(grid_size)}) {
        const auto path = out_dir / table.file;
        write_file(path, to_csv(table));
        written.push_back(path);
        ordered_json entry;
        entry["name"] = table.name;
        entry["file"] = table.file;
        entry["columns"] = table.columns;
        entry["rows"] = table.rows();
        if (!table.k_values.empty()) {
            entry["K"] = table.k_values;
        }
        meta["figures"].push_back(entry);
    }
    const auto meta_path = out_dir / "figures.json";
    write_file(meta_path, meta.dump(2) + "\n");
    written.push_back(meta_path);
    return written;
}

std::vector<double> parse_fractions(std::string_view text) {
    std::vector<double> out;
    if (text.empty()) {
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        std::string_view item = text.substr(start, end - start);
        while (!item.empty() && item.front() == ' ') {
            item.remove_prefix(1);
        }
        while (!item.empty() && item.back() == ' ') {
            item.remove_suffix(1);
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
            throw std::invalid_argument("--observers: '" + std::string(item) + "' is not a number");
        }
        if (!(value > 0.0 && value <= 1.0)) {
            throw std::invalid_argument("--observers: each fraction must lie in (0, 1], got " + std::string(item));
        }
        out.push_back(value);
        start = end + 1;
    }
    return out;
}

bool SimulateReport::within_limit() const {
    return std::all_of(z_scores.begin(), z_scores.end(), [](const ZScore &z) { return z.z < kZLimit; });
}

SimulateReport simulate(const SimulateOptions &options) {
    protocol::ProtocolConfig config;
    config.params.n_qutrits = options.n;
    config.params.epsilon = options.epsilon;
    config.params.bob_eta = options.eta;
    config.params.other_etas = options.observers;
    config.n_runs = options.runs;
    config.master_seed = options.seed;
    config.reversal_knows_total_tap = !options.bob_only_reversal;
    config.threads = options.threads;
    config.validate();

    SimulateReport report;
    report.options = options;
    const auto multi = protocol::run_multi_observer(config);
    report.stats = multi.stats;
    report.expected = multi.expected;
    report.observers = multi.observers;
    report.c0 = std::exp(config.params.log_c0());

    const auto &s = report.stats;
    const auto &e = report.expected;
    report.z_scores.push_back(binomial_z("p_error", s.p_error, e.p_error));
    report.z_scores.push_back(binomial_z("fidelity", s.fidelity, e.fidelity));
    // Each run pays either 0 or one fine, so the fine is a scaled Bernoulli variable.
    protocol::RateEstimate fines = protocol::binomial_rate(
        static_cast<std::int64_t>(std::llround(s.mean_fine * static_cast<double>(s.n_runs) / config.fine_per_failure)),
        s.n_runs);
    report.z_scores.push_back(
        binomial_z("mean_fine", fines, e.mean_fine / config.fine_per_failure, config.fine_per_failure));
    return report;
}

std::string render(const SimulateReport &report, OutputFormat format) {
    const auto &o = report.options;
    const auto &s = report.stats;
    const auto &e = report.expected;
    if (format == OutputFormat::json) {
        ordered_json j;
        j["schema_version"] = kSchemaVersion;
        j["parameters"] = {{"n", o.n},         {"epsilon", o.epsilon}, {"eta", o.eta},
                           {"observers", o.observers}, {"runs", o.runs}, {"seed", o.seed},
                           {"reversal", o.bob_only_reversal ? "bob_only" : "knows_total_tap"}};
        j["empirical"] = {{"p_error", s.p_error.value},
                          {"p_error_half_width", s.p_error.half_width},
                          {"spin_checks", s.p_error.trials},
                          {"fidelity", s.fidelity.value},
                          {"fidelity_half_width", s.fidelity.half_width},
                          {"bell_checks", s.fidelity.trials},
                          {"mean_fine", s.mean_fine},
                          {"mean_fine_half_width", s.mean_fine_half_width},
                          {"summed_fine", s.summed_fine}};
        j["closed_form"] = {{"c0", report.c0},       {"c", e.c},         {"p_error", e.p_error},   {"fidelity", e.fidelity},
                            {"mean_fine", e.mean_fine}, {"summed_fine", e.summed_fine}, {"d_rel", e.d_rel},
                            {"d_rev", e.d_rev}, {"K", e.k}};
        ordered_json obs = ordered_json::array();
        for (const auto &ob : report.observers) {
            obs.push_back({{"label", ob.label}, {"eta", ob.eta}, {"p_error", ob.p_error}, {"d_rel", ob.d_rel}});
        }
        j["observers"] = obs;
        ordered_json zs = ordered_json::array();
        for (const auto &z : report.z_scores) {
            zs.push_back({{"quantity", z.quantity},
                          {"empirical", z.empirical},
                          {"expected", z.expected},
                          {"sigma", z.sigma},
                          {"z", json_number(z.z)}});
        }
        j["z_scores"] = zs;
        j["within_limit"] = report.within_limit();
        return j.dump(2) + "\n";
    }
    if (format == OutputFormat::csv) {
        std::string out = "quantity,empirical,expected,sigma,z\n";
        for (const auto &z : report.z_scores) {
            out += fmt::format("{},{},{},{},{}\n", z.quantity, format_number(z.empirical), format_number(z.expected),
                               format_number(z.sigma), format_number(z.z));
        }
        out += fmt::format("summed_fine,{},{},,\n", format_number(s.summed_fine), format_number(e.summed_fine));
        return out;
    }
    std::string out = fmt::format("N={} epsilon={} eta={} observers=[{}] runs={} seed={} reversal={}\n", o.n,
                                  format_number(o.epsilon), format_number(o.eta), observers_text(o.observers), o.runs,
                                  o.seed, o.bob_only_reversal ? "bob_only" : "knows_total_tap");
    out += fmt::format("c={:.10f} K={:.10f} D_rel={:.10f} D_rev={:.10f}\n", e.c, e.k, e.d_rel, e.d_rev);
    out += fmt::format("{:<12}{:>14}{:>14}{:>14}{:>9}\n", "quantity", "empirical", "expected", "sigma", "z");
    for (const auto &z : report.z_scores) {
        out += fmt::format("{:<12}{:>14.8f}{:>14.8f}{:>14.8f}{:>9.3f}\n", z.quantity, z.empirical, z.expected, z.sigma,
                           z.z);
    }
    out += fmt::format("{:<12}{:>14.8f}{:>14.8f}\n", "summed_fine", s.summed_fine, e.summed_fine);
    for (const auto &ob : report.observers) {
        out += fmt::format("observer {} eta={} p_error={:.10f} D_rel={:.10f}\n", ob.label, format_number(ob.eta),
                           ob.p_error, ob.d_rel);
    }
    if (!report.observers.empty()) {
        // The many-observer regime is the strongly separated one, 1/c0 >> 1 (c0 itself is always below 1).
        out += fmt::format("separation regime: c0={:.6g}, 1/c0={:.6g} (many-observer limit read as 1/c0 >> 1)\n",
                           report.c0, 1.0 / report.c0);
    }
    out += fmt::format("{}\n", report.within_limit() ? "all z-scores below 4" : "z-score limit exceeded");
    return out;
}

std::string sweep_csv(double c0, int grid_size) {
    if (!(c0 > 0.0 && c0 < 1.0)) {
        throw std::invalid_argument("c0 must lie in (0, 1)");
    }
    std::string out = "eta,c,p_error,fidelity,d_rel,d_rev,theta,fine_expectation,residual\n";
    for (double eta : unit_grid(grid_size)) {
        const auto t = analysis::tradeoff_point(c0, eta);
        const double residual = std::abs(t.d_rel * t.d_rel + t.d_rev * t.d_rev - 1.0);
        for (double v : {t.eta, t.c, t.p_error, t.fidelity, t.d_rel, t.d_rev, t.theta, t.fine_expectation}) {
            out += format_number(v) + ",";
        }
        out += format_number(residual) + "\n";
    }
    return out;
}

std::vector<CheckResult> run_verify(const VerifyOptions &options) {
    std::vector<CheckResult> out;
    for (const auto &oc : oracle_grid()) {
        const double dev = engine_oracle_deviation(oc, options.inject_fault);
        out.push_back(check(fmt::format("oracle N={} eps={} eta={} eta~={}", oc.n, oc.eps, oc.eta, oc.eta_tilde),
                            dev <= 1e-7, fmt::format("max deviation {:.3g}", dev)));
    }
    for (auto &c : invariant_checks()) {
        out.push_back(std::move(c));
    }
    return out;
}

unsigned threads_from_env() {
    const char *raw = std::getenv("QREV_THREADS");
    if (raw == nullptr || *raw == '\0') {
        return 0;
    }
    const std::string_view text(raw);
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("QREV_THREADS must be a non-negative integer");
    }
    return value;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Reversible weak measurement: figures, Monte Carlo and verification"};
    app.name("qrev");
    app.require_subcommand(1);

    std::string out_dir = ".";
    int fig_grid = kDefaultFigureGrid;
    auto *figures = app.add_subcommand("figures", "Write fig3.csv, fig4.csv, fig5.csv and figures.json");
    figures->add_option("--out-dir,-o", out_dir, "Output directory");
    figures->add_option("--grid", fig_grid, "Points per curve")->check(CLI::Range(2, 1000000));

    SimulateOptions sim;
    std::string observers;
    bool as_json = false;
    bool as_csv = false;
    auto *simulate_cmd = app.add_subcommand("simulate", "Run the verification game as a seeded Monte Carlo");
    simulate_cmd->add_option("--n", sim.n, "Number of detector qutrits")->check(CLI::Range(1, 1 << 20));
    simulate_cmd->add_option("--epsilon", sim.epsilon, "Counter kick per qutrit")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--eta", sim.eta, "Bob's tapped fraction")->check(CLI::Range(0.0, 1.0));
    simulate_cmd->add_option("--observers", observers, "Silent observers' fractions, comma separated");
    simulate_cmd->add_option("--runs", sim.runs, "Number of runs")->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 40));
    simulate_cmd->add_option("--seed", sim.seed, "Master seed");
    simulate_cmd->add_flag("--bob-only-reversal", sim.bob_only_reversal,
                           "Bob undoes only his own share of the counter shift");
    auto *json_flag = simulate_cmd->add_flag("--json", as_json, "JSON report");
    simulate_cmd->add_flag("--csv", as_csv, "CSV report")->excludes(json_flag);

    std::optional<double> c0;
    std::optional<int> sweep_n;
    std::optional<double> sweep_eps;
    int sweep_grid = 101;
    std::string sweep_out;
    auto *sweep = app.add_subcommand("sweep", "Tabulate the closed forms over eta");
    auto *c0_opt = sweep->add_option("--c0", c0, "Overlap of the fully separated counter states");
    auto *n_opt = sweep->add_option("--n", sweep_n, "Number of detector qutrits")->check(CLI::Range(1, 1 << 20));
    auto *eps_opt = sweep->add_option("--epsilon", sweep_eps, "Counter kick per qutrit")->check(CLI::PositiveNumber);
    c0_opt->excludes(n_opt)->excludes(eps_opt);
    n_opt->needs(eps_opt);
    eps_opt->needs(n_opt);
    sweep->add_option("--grid", sweep_grid, "Number of eta values")->check(CLI::Range(2, 10000000));
    sweep->add_option("--output,-o", sweep_out, "Output file (default: stdout)");

    bool inject_fault = false;
    auto *verify = app.add_subcommand("verify", "Oracle equivalence grid and closed-form identities");
    verify->add_flag("--inject-fault", inject_fault)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*figures) {
            for (const auto &path : write_figures(out_dir, fig_grid)) {
                out << path.string() << "\n";
            }
            return kOk;
        }
        if (*simulate_cmd) {
            sim.observers = parse_fractions(observers);
            sim.threads = threads_from_env();
            const auto report = simulate(sim);
            out << render(report, as_json ? OutputFormat::json : as_csv ? OutputFormat::csv : OutputFormat::text);
            return report.within_limit() ? kOk : kCheckFailed;
        }
        if (*sweep) {
            if (!c0 && !sweep_n) {
                err << "sweep: give --c0 or both --n and --epsilon\n";
                return kUsage;
            }
            double value = 0.0;
            if (c0) {
                value = *c0;
            } else {
                ModelParams p;
                p.n_qutrits = *sweep_n;
                p.epsilon = *sweep_eps;
                value = std::exp(p.log_c0());
            }
            const std::string csv = sweep_csv(value, sweep_grid);
            if (sweep_out.empty()) {
                out << csv;
            } else {
                write_file(sweep_out, csv);
            }
            return kOk;
        }
        if (*verify) {
            const auto results = run_verify(VerifyOptions{inject_fault});
            int failed = 0;
            for (const auto &r : results) {
                out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
                failed += r.passed ? 0 : 1;
            }
            out << fmt::format("{} of {} checks passed\n", results.size() - failed, results.size());
            return failed == 0 ? kOk : kCheckFailed;
        }
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    }
    return kUsage;
}

}  // namespace qrev::cli
