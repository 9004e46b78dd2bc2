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

#include "mwdce/io.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "gtest/gtest.h"

using namespace mwdce;

TEST(ScenarioJson, round_trips_random_scenarios) {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> ph(-1.0, 1.0), unit(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        std::vector<Phase> a(1 + k % 4), b(1 + k % 3);
        for (auto& x : a) x = Phase::from_pi(ph(rng));
        for (auto& x : b) x = Phase::from_pi(ph(rng));
        Scenario s(a, b, unit(rng), 1.0 - 0.9 * unit(rng), k % 2 == 0);
        Scenario back = io::scenario_from_json(io::Json::parse(io::to_json(s).dump()));
        ASSERT_EQ(back.alphas().size(), s.alphas().size());
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(back.alphas()[i].radians(), s.alphas()[i].radians(), 1e-15);
        for (std::size_t j = 0; j < b.size(); ++j) EXPECT_NEAR(back.betas()[j].radians(), s.betas()[j].radians(), 1e-15);
        EXPECT_EQ(back.visibility(), s.visibility());
        EXPECT_EQ(back.efficiency(), s.efficiency());
        EXPECT_EQ(back.fair_sampling(), s.fair_sampling());
    }
}

TEST(ScenarioJson, errors) {
    EXPECT_THROW(io::scenario_from_json(io::Json::parse(R"({"betas_pi": [0]})")), ParseError);
    EXPECT_THROW(io::scenario_from_json(io::Json::parse(R"({"alphas_pi": "x", "betas_pi": [0]})")), ParseError);
    EXPECT_THROW(io::scenario_from_json(io::Json::parse(R"({"alphas_pi": [0], "betas_pi": [0], "visibility": 3})")),
                 DomainError);
    EXPECT_THROW(io::parse_json_text("{", "cfg"), ParseError);
}

TEST(PlanJson, parses_orders) {
    RunPlan p = io::plan_from_json(io::Json::parse(R"({"trials_per_setting": 7, "seed": 3, "setting_order": "random-per-trial"})"));
    EXPECT_EQ(p.trials_per_setting, 7u);
    EXPECT_EQ(p.seed, 3u);
    EXPECT_EQ(p.setting_order, SettingOrder::random_per_trial);
    EXPECT_THROW(io::plan_from_json(io::Json::parse(R"({"setting_order": "sorted"})")), ParseError);
    EXPECT_THROW(io::plan_from_json(io::Json::parse(R"({"trials_per_setting": 0})")), DomainError);
}

TEST(CountsCsv, round_trips_random_tables) {
    std::mt19937_64 rng(67);
    std::uniform_int_distribution<std::uint64_t> n(0, 1'000'000'000);
    for (int k = 0; k < 50; ++k) {
        CountTable c(1 + k % 5, 1 + k % 3);
        for (std::size_t i = 0; i < c.n_prep(); ++i)
            for (std::size_t j = 0; j < c.n_meas(); ++j) c.at(i, j) = {n(rng), n(rng), n(rng)};
        std::stringstream ss;
        io::write_counts_csv(ss, c);
        EXPECT_EQ(io::read_counts_csv(ss), c);
    }
}

TEST(CountsCsv, accepts_any_row_order) {
    std::istringstream in("i,j,n_e,n_d,n_none\n1,0,5,6,7\r\n0,0,1,2,3\n");
    CountTable c = io::read_counts_csv(in);
    EXPECT_EQ(c.n_prep(), 2u);
    EXPECT_EQ(c.at(1, 0), (CountCell{5, 6, 7}));
}

TEST(CountsCsv, errors) {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return io::read_counts_csv(in);
    };
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("i,j,e,d,none\n0,0,1,1,1\n"), ParseError);
    EXPECT_THROW(parse("i,j,n_e,n_d,n_none\n"), ParseError);
    EXPECT_THROW(parse("i,j,n_e,n_d,n_none\n0,0,1,1\n"), ParseError);
    EXPECT_THROW(parse("i,j,n_e,n_d,n_none\n0,0,1,-1,1\n"), ParseError);
    EXPECT_THROW(parse("i,j,n_e,n_d,n_none\n0,0,1,x,1\n"), ParseError);
    EXPECT_THROW(parse("i,j,n_e,n_d,n_none\n0,0,1,1,1\n0,0,1,1,1\n"), ParseError);
    EXPECT_THROW(parse("i,j,n_e,n_d,n_none\n0,0,1,1,1\n1,1,1,1,1\n"), ParseError);
}

TEST(ReportJson, round_trips) {
    WitnessReport r;
    r.det_abs = 0.0269;
    r.idw = 3.445;
    r.r = retrocausality(3.445);
    r.sigma_det = 44.8;
    r.uncertainties.det_abs = 0.0006;
    r.uncertainties.idw = 0.043;
    r.uncertainties.r = 0.0107;
    EXPECT_EQ(io::report_from_json(io::Json::parse(io::to_json(r).dump())), r);
    EXPECT_TRUE(io::to_json(r)["sigma_idw"].is_null());

    std::string row = io::report_csv_row(r);
    EXPECT_EQ(row, "0.0269,0.0006,44.8,3.445,0.043,," + io::format_double(r.r) + ",0.0107");
}

TEST(StrategyJson, round_trips_every_small_strategy) {
    for (const DeterministicStrategy& s : enumerate_deterministic(2, 3, 2)) {
        EXPECT_EQ(io::strategy_from_json(io::Json::parse(io::to_json(s).dump())), s);
    }
    MixedStrategy m{{{0.25, enumerate_deterministic(2, 4, 2).at(17)}, {0.75, enumerate_deterministic(2, 4, 2).at(200)}}};
    EXPECT_EQ(io::mixed_from_json(io::Json::parse(io::to_json(m).dump())), m);
}

TEST(StrategyJson, errors) {
    EXPECT_THROW(io::strategy_from_json(io::Json::parse(R"({"dimension": 2, "encode": [0, 2], "decode": [["e"], ["d"]]})")),
                 ParseError);
    EXPECT_THROW(io::strategy_from_json(io::Json::parse(R"({"dimension": 2, "encode": [0], "decode": [["e"], ["x"]]})")),
                 ParseError);
    EXPECT_THROW(io::strategy_from_json(io::Json::parse(R"({"dimension": 2, "encode": [0], "decode": [["e"]]})")),
                 ParseError);
}

TEST(ScheduleJson, round_trips_and_rejects_duplicates) {
    Schedule s;
    s.add({"pair_emission", {0, 0, 0}, 0});
    s.add({"alice_choice", {-20, 1.5, 0}, -40});
    s.media["charlie_alice"] = 0.68;
    s.fibers["charlie_alice"] = 28;
    io::Json j = io::to_json(s);
    Schedule back = io::schedule_from_json(io::Json::parse(j.dump()));
    EXPECT_EQ(back.event("alice_choice").position, s.event("alice_choice").position);
    EXPECT_EQ(back.event("alice_choice").time, -40.0);
    EXPECT_EQ(back.fibers, s.fibers);
    EXPECT_EQ(back.media, s.media);

    EXPECT_THROW(io::schedule_from_json(io::Json::parse(
                     R"({"events": [{"label": "a", "xyz_m": [0,0,0], "t_ns": 0}, {"label": "a", "xyz_m": [0,0,0], "t_ns": 1}]})")),
                 ParseError);
    EXPECT_THROW(io::schedule_from_json(io::Json::parse(R"({"events": [{"label": "a", "xyz_m": [0,0], "t_ns": 0}]})")),
                 ParseError);
}

TEST(FormatDouble, shortest_round_trip) {
    EXPECT_EQ(io::format_double(0.1), "0.1");
    EXPECT_EQ(io::format_double(1.0), "1");
    double x = 1 + 2 * std::sqrt(2.0);
    EXPECT_EQ(std::stod(io::format_double(x)), x);
}
