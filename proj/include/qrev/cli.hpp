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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrev/protocol.hpp"

/// Command-line front end: figure tables, Monte Carlo reports, tradeoff sweeps
/// and the verification suite. Everything the `qrev` binary prints is produced
/// here so that it can be driven from tests without spawning processes.
namespace qrev::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kDefaultFigureGrid = 201;
/// simulate exits nonzero when any |z| reaches this.
inline constexpr double kZLimit = 4.0;

/// Exit codes of the qrev binary.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kIoError = 3 };

/// Named real series of equal length, first column strictly increasing.
struct FigureTable {
    std::string name;
    std::string file;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> series;  // series[column][row]
    std::vector<double> k_values;
    int grid_size = 0;

    std::size_t rows() const { return series.empty() ? 0 : series.front().size(); }
    /// Throws std::logic_error if the invariants do not hold.
    void check() const;
};

/// D_rev against D_rel on K d_rev^2 + d_rel^2 = 1 for K = 1, 10, 100.
FigureTable fig3_table(int grid_size = kDefaultFigureGrid);
/// Expected fine 1 - (d_rev + d_rel)/2 along the same curves.
FigureTable fig4_table(int grid_size = kDefaultFigureGrid);
/// Mutual information against d_rel.
FigureTable fig5_table(int grid_size = kDefaultFigureGrid);

/// 17 significant digits, '.' separator, locale independent.
std::string format_number(double x);

/// Header row plus one line per row, LF endings.
std::string to_csv(const FigureTable &table);

/// Writes fig3.csv, fig4.csv, fig5.csv and figures.json; returns the paths written.
std::vector<std::filesystem::path> write_figures(const std::filesystem::path &out_dir,
                                                 int grid_size = kDefaultFigureGrid);

/// Parses "0.1,0.25" into fractions; empty input gives an empty list.
std::vector<double> parse_fractions(std::string_view text);

enum class OutputFormat { text, json, csv };

struct SimulateOptions {
    int n = 1;
    double epsilon = 1.0;
    double eta = 0.5;
    std::vector<double> observers;
    std::int64_t runs = 100000;
    std::uint64_t seed = 0;
    bool bob_only_reversal = false;
    unsigned threads = 0;
};

struct ZScore {
    std::string quantity;
    double empirical = 0.0;
    double expected = 0.0;
    double sigma = 0.0;
    double z = 0.0;
};

struct SimulateReport {
    SimulateOptions options;
    protocol::ProtocolStats stats;
    protocol::ClosedForms expected;
    std::vector<protocol::ObserverReliability> observers;
    std::vector<ZScore> z_scores;
    double c0 = 1.0;

    bool within_limit() const;
};

SimulateReport simulate(const SimulateOptions &options);
std::string render(const SimulateReport &report, OutputFormat format);

/// One row per eta on an even grid of [0, 1], all TradeoffPoint fields plus
/// the circle residual |d_rel^2 + d_rev^2 - 1|.
std::string sweep_csv(double c0, int grid_size);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyOptions {
    /// Negative control: the engine side is run with the opposite probe outcome.
    bool inject_fault = false;
};

std::vector<CheckResult> run_verify(const VerifyOptions &options = {});

/// Reads QREV_THREADS; 0 (auto) when unset. Throws std::invalid_argument on junk.
unsigned threads_from_env();

/// Entry point of the qrev binary.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace qrev::cli
