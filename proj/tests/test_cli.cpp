// Copyright 2026 The mwdce Authors
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

#include "mwdce/cli.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "gtest/gtest.h"

using namespace mwdce;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("mwdce_test_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    return p;
}

cli::RunConfig config(const Scenario& s, std::uint64_t trials, std::uint64_t seed, const fs::path& out) {
    cli::RunConfig c;
    c.scenario = s;
    c.plan.trials_per_setting = trials;
    c.plan.seed = seed;
    c.resamples = 1000;
    c.outputs = out;
    return c;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MWDCE_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::ostringstream sink;

}  // namespace

TEST(Predict, ideal_determinant_settings) {
    const fs::path out = scratch("predict_det");
    WitnessReport r = cli::cmd_predict(config(Scenario::determinant_settings(), 1, 0, out), sink);
    ASSERT_TRUE(r.det_abs);
    EXPECT_NEAR(*r.det_abs, 1.0, 1e-12);
    EXPECT_TRUE(fs::exists(out / "table.csv"));
    EXPECT_TRUE(fs::exists(out / "bars.csv"));
    EXPECT_EQ(io::report_from_json(io::Json::parse(cli::read_file(out / "report.json"))), r);
    EXPECT_EQ(count_lines(cli::read_file(out / "table.csv")), 1u + 8u);
}

TEST(Predict, ideal_dimension_witness_settings) {
    WitnessReport r =
        cli::cmd_predict(config(Scenario::dimension_witness_settings(), 1, 0, scratch("predict_idw")), sink);
    EXPECT_FALSE(r.det_abs);
    EXPECT_NEAR(r.idw, 1 + 2 * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(r.r, (2 * std::sqrt(2.0) - 2) / 4, 1e-12);
}

TEST(Predict, zero_visibility_has_no_signal) {
    WitnessReport d = cli::cmd_predict(config(Scenario::determinant_settings(0.0), 1, 0, scratch("v0_det")), sink);
    EXPECT_NEAR(*d.det_abs, 0.0, 1e-15);
    WitnessReport i =
        cli::cmd_predict(config(Scenario::dimension_witness_settings(0.0), 1, 0, scratch("v0_idw")), sink);
    EXPECT_NEAR(i.idw, 0.0, 1e-15);
    EXPECT_EQ(i.r, 0.0);
}

TEST(Predict, bar_chart_sign_column) {
    const fs::path out = scratch("bars");
    cli::cmd_predict(config(Scenario::dimension_witness_settings(), 1, 0, out), sink);
    std::istringstream in(cli::read_file(out / "bars.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "i,j,alpha_pi,beta_pi,p_e_given_click,p_d_given_click,D,idw_sign");
    std::vector<std::string> signs;
    while (std::getline(in, line)) signs.push_back(line.substr(line.rfind(',') + 1));
    EXPECT_EQ(signs, (std::vector<std::string>{"1", "1", "1", "-1", "-1", "0"}));
}

TEST(Simulate, ideal_determinant_within_three_sigma) {
    cli::RunConfig c = config(Scenario::determinant_settings(), 100'000, 11, scratch("sim_ideal"));
    WitnessReport r = cli::cmd_simulate(c, sink);
    ASSERT_TRUE(r.det_abs && r.uncertainties.det_abs);
    EXPECT_GT(*r.uncertainties.det_abs, 0.0);
    EXPECT_LE(std::abs(*r.det_abs - 1.0), 3 * *r.uncertainties.det_abs);
}

TEST(Simulate, lossy_no_fair_sampling_within_three_sigma) {
    const double v = 0.882, eta = 0.186;
    cli::RunConfig c = config(Scenario::determinant_settings(v, eta, false), 1'000'000, 12, scratch("sim_lossy"));
    WitnessReport r = cli::cmd_simulate(c, sink);
    const double expected = eta * eta * v * v;
    EXPECT_NEAR(expected, 0.0269, 5e-5);
    EXPECT_LE(std::abs(*r.det_abs - expected), 3 * *r.uncertainties.det_abs);
    ASSERT_TRUE(r.sigma_det);
    EXPECT_GT(*r.sigma_det, 10.0);
}

TEST(Simulate, same_seed_gives_identical_bytes) {
    cli::RunConfig a = config(Scenario::dimension_witness_settings(0.9, 0.3), 20'000, 5, scratch("rep_a"));
    cli::RunConfig b = a;
    b.outputs = scratch("rep_b");
    cli::cmd_simulate(a, sink);
    cli::cmd_simulate(b, sink);
    for (const char* f : {"report.json", "report.csv", "counts.csv", "estimate.csv", "bars.csv"}) {
        EXPECT_EQ(cli::read_file(a.outputs / f), cli::read_file(b.outputs / f)) << f;
    }
    cli::RunConfig d = a;
    d.plan.seed = 6;
    d.outputs = scratch("rep_d");
    cli::cmd_simulate(d, sink);
    EXPECT_NE(cli::read_file(a.outputs / "counts.csv"), cli::read_file(d.outputs / "counts.csv"));
}

TEST(Report, reingesting_counts_reproduces_simulation_report) {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int k = 0; k < 4; ++k) {
        const bool fsa = k % 2 == 0;
        Scenario s = k < 2 ? Scenario::determinant_settings(u(rng), u(rng), fsa)
                           : Scenario::dimension_witness_settings(u(rng), u(rng), fsa);
        cli::RunConfig c = config(s, 5'000, 100 + k, scratch("sim_" + std::to_string(k)));
        WitnessReport simulated = cli::cmd_simulate(c, sink);
        const fs::path again = scratch("again_" + std::to_string(k));
        WitnessReport reported = cli::cmd_report(c.outputs / "counts.csv", c.resamples, c.plan.seed, fsa, again, sink);
        EXPECT_EQ(simulated, reported);
        EXPECT_EQ(cli::read_file(c.outputs / "report.json"), cli::read_file(again / "report.json"));
    }
}

TEST(Config, bare_scenario_and_overrides) {
    cli::RunConfig c = cli::parse_config(io::Json::parse(R"({"alphas_pi": [0.25], "betas_pi": [0]})"));
    EXPECT_EQ(c.scenario.alphas().size(), 1u);
    cli::Overrides o;
    o.seed = 9;
    o.trials = 77;
    o.fair_sampling = false;
    cli::apply(c, o);
    EXPECT_EQ(c.plan.seed, 9u);
    EXPECT_EQ(c.plan.trials_per_setting, 77u);
    EXPECT_FALSE(c.scenario.fair_sampling());
    EXPECT_THROW(cli::parse_config(io::Json::parse("[1]")), ParseError);
}

TEST(Config, shipped_configs_load) {
    for (const char* name : {"determinant_ideal.json", "dimension_witness_ideal.json", "determinant_lossy_no_fsa.json",
                             "dimension_witness_lossy.json"}) {
        cli::RunConfig c = cli::load_config(fs::path(MWDCE_DATA_DIR) / name);
        EXPECT_GT(c.plan.trials_per_setting, 0u) << name;
    }
    cli::RunConfig c = cli::load_config(fs::path(MWDCE_DATA_DIR) / "determinant_lossy_no_fsa.json");
    ASSERT_TRUE(c.schedule);
    EXPECT_TRUE(validate(*c.schedule).all_passed());
}

TEST(Bounds, dimension_witness_qubit_and_qutrit) {
    cli::BoundsRequest q;
    q.out = scratch("bounds_d2");
    io::Json j = cli::cmd_bounds(q, sink);
    EXPECT_EQ(j["value"].get<double>(), 3.0);
    EXPECT_EQ(j["strategies_checked"].get<std::uint64_t>(), 128u);
    EXPECT_EQ(count_lines(cli::read_file(q.out / "certificate.csv")), 1u + 128u);
    DeterministicStrategy arg = io::strategy_from_json(j["argmax"]);
    EXPECT_EQ(LinearWitness::dimension_witness().evaluate(arg), 3.0);

    q.dimension = 3;
    q.out = scratch("bounds_d3");
    EXPECT_EQ(cli::cmd_bounds(q, sink)["value"].get<double>(), 5.0);
}

TEST(Bounds, determinant_qubit_is_zero) {
    cli::BoundsRequest q;
    q.kind = cli::WitnessKind::det;
    q.restarts = 2000;
    q.out = scratch("bounds_det");
    io::Json j = cli::cmd_bounds(q, sink);
    EXPECT_LE(j["value"].get<double>(), 1e-9);
    EXPECT_TRUE(fs::exists(q.out / "bound.json"));
}

TEST(Spacetime, fixture_and_delayed_choice) {
    Schedule s = cli::load_schedule(fs::path(MWDCE_DATA_DIR) / "two_lab_schedule.json");
    EXPECT_EQ(cli::cmd_spacetime(s, scratch("st_ok"), sink), cli::kOk);
    Event& b = s.events.at(labels::kBobChoice);
    b.time += 200.0;
    const fs::path out = scratch("st_bad");
    EXPECT_EQ(cli::cmd_spacetime(s, out, sink), cli::kValidationFailure);
    io::Json j = io::Json::parse(cli::read_file(out / "spacetime.json"));
    EXPECT_FALSE(j["all_passed"].get<bool>());
}

TEST(Binary, exit_codes) {
    const std::string data = MWDCE_DATA_DIR;
    const fs::path out = scratch("bin");
    EXPECT_EQ(run_cli("spacetime --schedule " + data + "/two_lab_schedule.json --out " + out.string()), 0);

    Schedule s = cli::load_schedule(fs::path(data) / "two_lab_schedule.json");
    s.events.at(labels::kBobChoice).time += 200.0;
    fs::create_directories(out);
    cli::write_file(out / "late.json", io::to_json(s).dump());
    EXPECT_EQ(run_cli("spacetime --schedule " + (out / "late.json").string() + " --out " + out.string()), 3);

    cli::write_file(out / "empty.json", "");
    EXPECT_EQ(run_cli("spacetime --schedule " + (out / "empty.json").string() + " --out " + out.string()), 1);
    EXPECT_EQ(run_cli("spacetime --schedule " + (out / "missing.json").string()), 1);
    EXPECT_EQ(run_cli("predict"), 1);
    EXPECT_EQ(run_cli("bounds -d 40 --out " + out.string()), 2);
    EXPECT_EQ(run_cli("predict --config " + data + "/dimension_witness_ideal.json --out " + out.string()), 0);
    EXPECT_TRUE(fs::exists(out / "report.json"));
}
