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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mwdce/cli.hpp"

namespace {

using namespace mwdce;
using namespace mwdce::cli;

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ParseError("--fair-sampling expects true/false, got '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delayed-choice prepare-and-measure witnesses: predictions, simulations, classical bounds, causality"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed, trials;
    std::optional<std::size_t> resamples;
    std::string fair_sampling;
    std::string out_dir;

    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config (scenario, plan, resamples, outputs)")->required();
        sub->add_option("--seed", seed, "RNG seed");
        sub->add_option("--trials", trials, "trials per setting");
        sub->add_option("--resamples", resamples, "bootstrap resamples");
        sub->add_option("--fair-sampling", fair_sampling, "postselect on detections (true/false)");
        sub->add_option("--out", out_dir, "output directory");
    };

    CLI::App* predict = app.add_subcommand("predict", "analytic table and witness report");
    add_run_flags(predict);
    CLI::App* simulate = app.add_subcommand("simulate", "sampled counts and bootstrap witness report");
    add_run_flags(simulate);

    CLI::App* report = app.add_subcommand("report", "bootstrap witness report of a counts CSV");
    std::string counts_path;
    report->add_option("--counts", counts_path, "CSV with columns i,j,n_e,n_d,n_none")->required();
    report->add_option("--seed", seed, "RNG seed");
    report->add_option("--resamples", resamples, "bootstrap resamples");
    report->add_option("--fair-sampling", fair_sampling, "postselect on detections (true/false)");
    report->add_option("--out", out_dir, "output directory");

    CLI::App* bounds = app.add_subcommand("bounds", "classical hidden-variable bound of a witness");
    BoundsRequest bq;
    std::string witness_kind = "idw";
    std::string randomness = "independent";
    bounds->add_option("--dimension,-d", bq.dimension, "message dimension")->check(CLI::PositiveNumber);
    bounds->add_option("--witness", witness_kind, "idw or det")->check(CLI::IsMember({"idw", "det"}));
    bounds->add_option("--seed", seed, "RNG seed of the mixture search");
    bounds->add_option("--restarts", bq.restarts, "mixture-search restarts");
    bounds->add_option("--randomness", randomness, "det search model: independent or shared")
        ->check(CLI::IsMember({"independent", "shared"}));
    bounds->add_option("--out", out_dir, "output directory");

    CLI::App* spacetime = app.add_subcommand("spacetime", "causality checks of an event schedule");
    std::string schedule_path;
    spacetime->add_option("--schedule,--config", schedule_path, "schedule JSON")->required();
    spacetime->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsageError;
    }

    try {
        if (predict->parsed() || simulate->parsed()) {
            RunConfig cfg = load_config(config_path);
            Overrides o{seed, trials, resamples, std::nullopt, std::nullopt};
            if (!fair_sampling.empty()) o.fair_sampling = parse_bool(fair_sampling);
            if (!out_dir.empty()) o.out = out_dir;
            apply(cfg, o);
            if (predict->parsed()) {
                cmd_predict(cfg);
            } else {
                cmd_simulate(cfg);
            }
            return kOk;
        }
        if (report->parsed()) {
            cmd_report(counts_path, resamples.value_or(kDefaultResamples), seed.value_or(0),
                       fair_sampling.empty() ? true : parse_bool(fair_sampling), out_dir.empty() ? "out" : out_dir);
            return kOk;
        }
        if (bounds->parsed()) {
            bq.kind = witness_kind == "det" ? WitnessKind::det : WitnessKind::idw;
            bq.randomness = randomness == "shared" ? Randomness::shared : Randomness::independent;
            bq.seed = seed.value_or(0);
            if (!out_dir.empty()) bq.out = out_dir;
            cmd_bounds(bq);
            return kOk;
        }
        if (spacetime->parsed()) {
            return cmd_spacetime(load_schedule(schedule_path), out_dir.empty() ? "out" : out_dir);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return kUsageError;
}
