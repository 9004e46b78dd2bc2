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

#include "mwdce/trials.hpp"

#include <cmath>

#include "gtest/gtest.h"

using namespace mwdce;

namespace {

ProbabilityTable single_cell(Cell c) {
    ProbabilityTable t(1, 1);
    t.at(0, 0) = c;
    return t;
}

CountTable single_count(CountCell c) {
    CountTable t(1, 1);
    t.at(0, 0) = c;
    return t;
}

}  // namespace

TEST(Sample, degenerate_cell) {
    CountTable c = sample(single_cell({1.0, 0.0, 0.0}), {1000, 3, SettingOrder::round_robin});
    EXPECT_EQ(c.at(0, 0), (CountCell{1000, 0, 0}));
}

TEST(Sample, fair_coin_concentrates) {
    // Hoeffding: P(|n_e/N - 1/2| >= 0.002) <= 2 exp(-2 N 0.002^2) for N = 1e6.
    const double n = 1e6, t = 0.002;
    ASSERT_LE(2 * std::exp(-2 * n * t * t), 1e-3);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CountTable c = sample(single_cell({0.5, 0.5, 0.0}), {1'000'000, seed, SettingOrder::round_robin});
        EXPECT_LT(std::abs(c.at(0, 0).n_e / n - 0.5), t);
        EXPECT_EQ(c.at(0, 0).n_trials(), 1'000'000u);
    }
}

TEST(Sample, fixed_seed_is_reproducible) {
    ProbabilityTable t = probability_table(Scenario::determinant_settings(0.9, 0.3, false));
    for (SettingOrder order : {SettingOrder::round_robin, SettingOrder::random_per_trial}) {
        RunPlan plan{5000, 1234, order};
        EXPECT_EQ(sample(t, plan), sample(t, plan));
        plan.seed = 1235;
        EXPECT_NE(sample(t, {5000, 1234, order}), sample(t, plan));
    }
}

TEST(Sample, random_order_draws_settings_uniformly) {
    ProbabilityTable t = probability_table(Scenario::determinant_settings());
    CountTable c = sample(t, {10'000, 8, SettingOrder::random_per_trial});
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            total += c.at(i, j).n_trials();
            // Binomial(80000, 1/8): sd ~ 94, so 6 sd.
            EXPECT_NEAR(static_cast<double>(c.at(i, j).n_trials()), 10'000.0, 560.0);
        }
    EXPECT_EQ(total, 80'000u);
}

TEST(Sample, rejects_empty_plan) {
    EXPECT_THROW(sample(single_cell({1.0, 0.0, 0.0}), {0, 0, SettingOrder::round_robin}), DomainError);
}

TEST(Estimate, frequencies) {
    auto near = [](const Cell& a, Cell b) {
        EXPECT_NEAR(a.p_e, b.p_e, 1e-15);
        EXPECT_NEAR(a.p_d, b.p_d, 1e-15);
        EXPECT_NEAR(a.p_none, b.p_none, 1e-15);
    };
    near(estimate(single_count({800, 200, 0}), true).at(0, 0), {0.8, 0.2, 0.0});
    near(estimate(single_count({80, 20, 900}), false).at(0, 0), {0.08, 0.02, 0.90});
    near(estimate(single_count({80, 20, 900}), true).at(0, 0), {0.8, 0.2, 0.0});
}

TEST(Estimate, empty_cells) {
    EXPECT_THROW(estimate(single_count({0, 0, 50}), true), InsufficientStatistics);
    EXPECT_THROW(estimate(single_count({0, 0, 0}), false), InsufficientStatistics);
    EXPECT_NO_THROW(estimate(single_count({0, 0, 50}), false));
}

TEST(Estimate, converges_to_the_model) {
    for (bool fsa : {true, false}) {
        Scenario s = Scenario::determinant_settings(0.88, 0.4, fsa);
        ProbabilityTable raw = probability_table(s.with(0.88, 0.4, false));
        CountTable c = sample(raw, {1'000'000, 77, SettingOrder::round_robin});
        EXPECT_LT(max_abs_difference(estimate(c, fsa), probability_table(s)), 5e-3);
    }
}

TEST(Bootstrap, ideal_run_recovers_unit_determinant) {
    ProbabilityTable t = probability_table(Scenario::determinant_settings());
    CountTable c = sample(t, {100'000, 2024, SettingOrder::round_robin});
    WitnessReport r = bootstrap_report(c, 2000, 9, true);
    ASSERT_TRUE(r.det_abs && r.uncertainties.det_abs);
    EXPECT_LT(*r.uncertainties.det_abs, 0.01);
    EXPECT_LE(std::abs(*r.det_abs - 1.0), 3 * *r.uncertainties.det_abs);
    EXPECT_EQ(r.r, retrocausality(r.idw));
}

TEST(Bootstrap, error_halves_when_trials_quadruple) {
    Scenario s = Scenario::dimension_witness_settings(0.9);
    ProbabilityTable t = probability_table(s);
    WitnessReport small = bootstrap_report(sample(t, {20'000, 1, SettingOrder::round_robin}), 4000, 2, true);
    WitnessReport large = bootstrap_report(sample(t, {80'000, 1, SettingOrder::round_robin}), 4000, 2, true);
    EXPECT_NEAR(small.uncertainties.idw / large.uncertainties.idw, 2.0, 0.4);
}

TEST(Bootstrap, deterministic_and_schedule_independent) {
    ProbabilityTable t = probability_table(Scenario::determinant_settings(0.9, 0.2, false));
    CountTable c = sample(t, {10'000, 5, SettingOrder::round_robin});
    WitnessReport a = bootstrap_report(c, 500, 11, false, 1);
    WitnessReport b = bootstrap_report(c, 500, 11, false, 3);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, bootstrap_report(c, 500, 11, false, 1));
    EXPECT_NE(a, bootstrap_report(c, 500, 12, false, 1));
}

TEST(Bootstrap, argument_checks) {
    ProbabilityTable t = probability_table(Scenario::determinant_settings());
    CountTable c = sample(t, {100, 5, SettingOrder::round_robin});
    EXPECT_THROW(bootstrap_report(c, 99, 0, true), DomainError);
    CountTable tiny(2, 2);
    EXPECT_THROW(bootstrap_report(tiny, 100, 0, false), InsufficientStatistics);
    CountTable dark(4, 2);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 2; ++j) dark.at(i, j) = {0, 0, 10};
    EXPECT_THROW(bootstrap_report(dark, 100, 0, true), InsufficientStatistics);
}

TEST(Bootstrap, dimension_witness_tables_have_no_determinant) {
    ProbabilityTable t = probability_table(Scenario::dimension_witness_settings(0.9));
    WitnessReport r = bootstrap_report(sample(t, {10'000, 3, SettingOrder::round_robin}), 200, 4, true);
    EXPECT_FALSE(r.det_abs.has_value());
    EXPECT_FALSE(r.sigma_det.has_value());
    EXPECT_TRUE(r.sigma_idw.has_value());
}

TEST(Bootstrap, fitted_visibility_limit) {
    const double v = std::sqrt(0.778);
    EXPECT_NEAR(v, 0.882, 5e-4);
    EXPECT_NEAR(determinant_witness(probability_table(Scenario::determinant_settings(v))), 0.778, 1e-12);
}
