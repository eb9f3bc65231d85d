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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

using namespace qrev::cli;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "qrev");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<double>> parse_csv(const std::string &text, std::vector<std::string> *header) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::istringstream h(line);
    for (std::string cell; std::getline(h, cell, ',');) {
        header->push_back(cell);
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream r(line);
        for (std::string cell; std::getline(r, cell, ',');) {
            row.push_back(std::stod(cell));
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST(Figures, tables_have_expected_shape) {
    const auto f3 = fig3_table();
    EXPECT_EQ(f3.rows(), 201u);
    EXPECT_EQ(f3.columns, (std::vector<std::string>{"d_rel", "d_rev_K1", "d_rev_K10", "d_rev_K100"}));
    EXPECT_EQ(f3.series[1][0], 1.0);
    EXPECT_NEAR(f3.series[3][0], 0.1, 1e-16);
    EXPECT_EQ(f3.series[1].back(), 0.0);

    const auto f4 = fig4_table();
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < f4.rows(); ++i) {
        if (f4.series[1][i] < f4.series[1][argmin]) {
            argmin = i;
        }
    }
    EXPECT_NEAR(f4.series[0][argmin], std::sqrt(0.5), 0.005);
    EXPECT_NEAR(f4.series[1][argmin], 1.0 - std::sqrt(0.5), 1e-4);

    const auto f5 = fig5_table(11);
    EXPECT_EQ(f5.series[1].front(), 0.0);
    EXPECT_EQ(f5.series[1].back(), 1.0);
    EXPECT_THROW(fig5_table(1), std::invalid_argument);

    FigureTable broken = f5;
    broken.series[0][3] = broken.series[0][2];
    EXPECT_THROW(broken.check(), std::logic_error);
}

TEST(Figures, csv_format) {
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(1.0), "1");
    const std::string csv = to_csv(fig5_table(3));
    EXPECT_EQ(csv, "d_rel,mutual_info\n0,0\n0.5,0.18872187554086717\n1,1\n");
    EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(Figures, command_writes_files_deterministically) {
    const auto dir = std::filesystem::temp_directory_path() / "qrev_cli_test_figs";
    std::filesystem::remove_all(dir);
    const auto first = invoke({"figures", "--out-dir", dir.string(), "--grid", "21"});
    ASSERT_EQ(first.code, 0) << first.err;
    const std::string fig3 = slurp(dir / "fig3.csv");
    const std::string meta = slurp(dir / "figures.json");
    EXPECT_NE(meta.find("\"schema_version\": 1"), std::string::npos);
    ASSERT_EQ(invoke({"figures", "--out-dir", dir.string(), "--grid", "21"}).code, 0);
    EXPECT_EQ(slurp(dir / "fig3.csv"), fig3);
    std::vector<std::string> header;
    EXPECT_EQ(parse_csv(fig3, &header).size(), 21u);
    std::filesystem::remove_all(dir);
}

TEST(Fractions, parsing) {
    EXPECT_TRUE(parse_fractions("").empty());
    EXPECT_EQ(parse_fractions("0.2, 0.1"), (std::vector<double>{0.2, 0.1}));
    EXPECT_THROW(parse_fractions("0.2,"), std::invalid_argument);
    EXPECT_THROW(parse_fractions("abc"), std::invalid_argument);
    EXPECT_THROW(parse_fractions("0"), std::invalid_argument);
    EXPECT_THROW(parse_fractions("1.5"), std::invalid_argument);
}

TEST(Simulate, reference_run_is_within_limits_and_reproducible) {
    const std::vector<std::string> args{"simulate", "--n", "2", "--epsilon", "0.5", "--eta", "0.5",
                                        "--runs", "20000", "--seed", "42", "--json"};
    const auto a = invoke(args);
    EXPECT_EQ(a.code, 0) << a.out;
    EXPECT_NE(a.out.find("\"schema_version\": 1"), std::string::npos);
    EXPECT_NE(a.out.find("\"within_limit\": true"), std::string::npos);
    setenv("QREV_THREADS", "3", 1);
    const auto b = invoke(args);
    unsetenv("QREV_THREADS");
    EXPECT_EQ(a.out, b.out);
}

TEST(Simulate, no_measurement_gives_perfect_fidelity) {
    SimulateOptions o;
    o.eta = 0.0;
    o.runs = 3000;
    o.seed = 1;
    const auto r = simulate(o);
    EXPECT_EQ(r.stats.fidelity.value, 1.0);
    EXPECT_EQ(r.z_scores[1].z, 0.0);
    EXPECT_TRUE(r.within_limit());
    const std::string csv = render(r, OutputFormat::csv);
    EXPECT_EQ(csv.rfind("quantity,empirical,expected,sigma,z\n", 0), 0u);
    EXPECT_NE(render(r, OutputFormat::text).find("all z-scores below 4"), std::string::npos);
}

TEST(Simulate, wrong_expectation_exceeds_limit) {
    SimulateReport r;
    r.z_scores = {{"p_error", 0.1, 0.0, 0.01, 4.0}};
    EXPECT_FALSE(r.within_limit());
    r.z_scores[0].z = 3.99;
    EXPECT_TRUE(r.within_limit());
}

TEST(Simulate, flag_validation) {
    EXPECT_EQ(invoke({"simulate", "--eta", "1.5"}).code, kUsage);
    EXPECT_EQ(invoke({"simulate", "--epsilon", "-1"}).code, kUsage);
    EXPECT_EQ(invoke({"simulate", "--runs", "0"}).code, kUsage);
    EXPECT_EQ(invoke({"simulate", "--json", "--csv"}).code, kUsage);
    const auto over = invoke({"simulate", "--eta", "0.5", "--observers", "0.3,0.3", "--runs", "10"});
    EXPECT_EQ(over.code, kUsage);
    EXPECT_NE(over.err.find("exceeds 1"), std::string::npos);
    const auto junk = invoke({"simulate", "--observers", "x", "--runs", "10"});
    EXPECT_NE(junk.err.find("not a number"), std::string::npos);
    setenv("QREV_THREADS", "lots", 1);
    EXPECT_EQ(invoke({"simulate", "--runs", "10"}).code, kUsage);
    unsetenv("QREV_THREADS");
    EXPECT_EQ(invoke({}).code, kUsage);
}

TEST(Sweep, rows_and_residuals) {
    const auto r = invoke({"sweep", "--n", "1", "--epsilon", "1", "--grid", "101"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::vector<std::string> header;
    const auto rows = parse_csv(r.out, &header);
    ASSERT_EQ(rows.size(), 101u);
    EXPECT_EQ(header.back(), "residual");
    EXPECT_EQ(rows[0][2], 0.5);
    EXPECT_EQ(rows[0][3], 1.0);
    for (const auto &row : rows) {
        EXPECT_LE(row.back(), 1e-12);
    }
    // c0 = e^-2 has its optimum at eta = ln2/4; the nearest grid row sits close to the minimum fine.
    std::size_t best = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        best = rows[i][7] < rows[best][7] ? i : best;
    }
    EXPECT_NEAR(rows[best][7], 1.0 - std::sqrt(0.5), 1e-4);
    EXPECT_EQ(invoke({"sweep", "--c0", "1.5"}).code, kUsage);
    EXPECT_EQ(invoke({"sweep"}).code, kUsage);
    EXPECT_EQ(invoke({"sweep", "--c0", "0.5", "--n", "2", "--epsilon", "1"}).code, kUsage);
    EXPECT_EQ(sweep_csv(0.5, 7), invoke({"sweep", "--c0", "0.5", "--grid", "7"}).out);
}

TEST(Verify, passes_and_detects_injected_fault) {
    const auto good = invoke({"verify"});
    EXPECT_EQ(good.code, 0) << good.out;
    EXPECT_EQ(good.out.find("FAIL"), std::string::npos);
    const auto bad = invoke({"verify", "--inject-fault"});
    EXPECT_EQ(bad.code, kCheckFailed);
    EXPECT_NE(bad.out.find("FAIL oracle"), std::string::npos);
    EXPECT_EQ(invoke({"verify", "--help"}).out.find("inject"), std::string::npos);
}
