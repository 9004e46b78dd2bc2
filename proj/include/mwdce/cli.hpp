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

// Batch commands behind the `mwdce` executable. Each command is a pure
// function of its config and seed and writes its artifacts into one output
// directory.
//
// Exit codes: 0 success, 1 usage/config/IO error, 2 domain error,
// 3 spacetime validation failure.

#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mwdce/error.hpp"
#include "mwdce/hv.hpp"
#include "mwdce/io.hpp"
#include "mwdce/scenario.hpp"
#include "mwdce/spacetime.hpp"
#include "mwdce/trials.hpp"
#include "mwdce/witness.hpp"

namespace mwdce::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsageError = 1, kDomainError = 2, kValidationFailure = 3 };

/// Thrown for unreadable inputs and unwritable outputs.
class IoError : public Error {
   public:
    using Error::Error;
};

struct RunConfig {
    Scenario scenario = Scenario::determinant_settings();
    RunPlan plan;
    std::size_t resamples = kDefaultResamples;
    std::optional<Schedule> schedule;
    fs::path outputs = "out";
};

/// Command-line values that take precedence over the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<std::size_t> resamples;
    std::optional<bool> fair_sampling;
    std::optional<fs::path> out;
};

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + p.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out || !(out << content)) {
        throw IoError("cannot write '" + p.string() + "'");
    }
}

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
}

inline Schedule load_schedule(const fs::path& p) {
    const std::string text = read_file(p);
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw ParseError(p.string() + ": schedule file is empty");
    }
    return io::schedule_from_json(io::parse_json_text(text, p.string()));
}

/// A config is either a bare scenario object or an object with keys
/// `scenario`, `plan`, `resamples`, `schedule` (object or path), `outputs`.
inline RunConfig parse_config(const io::Json& j, const fs::path& base_dir = {}) {
    if (!j.is_object()) {
        throw ParseError("config must be a JSON object");
    }
    RunConfig c;
    c.scenario = io::scenario_from_json(j.contains("scenario") ? j.at("scenario") : j);
    if (j.contains("plan")) {
        c.plan = io::plan_from_json(j.at("plan"));
    }
    c.resamples = io::detail::optional_or<std::size_t>(j, "resamples", c.resamples, "config");
    if (j.contains("schedule")) {
        const io::Json& s = j.at("schedule");
        c.schedule = s.is_string() ? load_schedule(base_dir / s.get<std::string>()) : io::schedule_from_json(s);
    }
    if (j.contains("outputs")) {
        c.outputs = io::detail::required<std::string>(j, "outputs", "config");
    }
    return c;
}

inline RunConfig load_config(const fs::path& p) {
    return parse_config(io::parse_json_text(read_file(p), p.string()), p.parent_path());
}

inline void apply(RunConfig& c, const Overrides& o) {
    if (o.seed) c.plan.seed = *o.seed;
    if (o.trials) c.plan.trials_per_setting = *o.trials;
    if (o.resamples) c.resamples = *o.resamples;
    if (o.fair_sampling) {
        c.scenario = c.scenario.with(c.scenario.visibility(), c.scenario.efficiency(), *o.fair_sampling);
    }
    if (o.out) c.outputs = *o.out;
    c.plan.validate();
}

/// Seed of the bootstrap stream for a run seeded with `seed`.
inline std::uint64_t bootstrap_seed(std::uint64_t seed) {
    return detail::derive_seed(seed, 0xb007);
}

/// Per-setting bar data: probabilities conditioned on a detection and the
/// correlator <D_ij> with its sign in I_DW (0 when the term is not in I_DW).
inline std::string bar_chart_csv(const ProbabilityTable& t, const Scenario& s) {
    const LinearWitness idw = LinearWitness::dimension_witness();
    std::ostringstream os;
    os << "i,j,alpha_pi,beta_pi,p_e_given_click,p_d_given_click,D,idw_sign\n";
    for (std::size_t i = 0; i < t.n_prep(); ++i) {
        for (std::size_t j = 0; j < t.n_meas(); ++j) {
            const Cell& c = t.at(i, j);
            const double clicks = c.p_e + c.p_d;
            const double sign = (i < idw.n_prep() && j < idw.n_meas()) ? idw.coef_e(i, j) : 0.0;
            os << i << ',' << j << ',' << io::format_double(s.alphas()[i].in_pi()) << ','
               << io::format_double(s.betas()[j].in_pi()) << ','
               << io::format_double(clicks > 0 ? c.p_e / clicks : 0.0) << ','
               << io::format_double(clicks > 0 ? c.p_d / clicks : 0.0) << ',' << io::format_double(c.correlator())
               << ',' << io::format_double(sign) << '\n';
        }
    }
    return os.str();
}

inline void write_report(const fs::path& dir, const WitnessReport& r) {
    write_file(dir / "report.json", io::to_json(r).dump(2) + "\n");
    write_file(dir / "report.csv", std::string(io::kReportCsvHeader) + "\n" + io::report_csv_row(r) + "\n");
}

inline void print_report(std::ostream& log, const WitnessReport& r) {
    if (r.det_abs) {
        log << "|det W| = " << io::format_double(*r.det_abs);
        if (r.uncertainties.det_abs && *r.uncertainties.det_abs > 0) {
            log << " +/- " << io::format_double(*r.uncertainties.det_abs);
        }
        if (r.sigma_det) log << "  (" << io::format_double(*r.sigma_det) << " sigma above 0)";
        log << "\n";
    }
    log << "I_DW = " << io::format_double(r.idw);
    if (r.uncertainties.idw > 0) log << " +/- " << io::format_double(r.uncertainties.idw);
    if (r.sigma_idw) log << "  (" << io::format_double(*r.sigma_idw) << " sigma above 3)";
    log << "\nR = " << io::format_double(r.r) << "\n";
}

/// Analytic probability table, witness report and bar-chart data.
inline WitnessReport cmd_predict(const RunConfig& c, std::ostream& log = std::cout) {
    ensure_dir(c.outputs);
    const ProbabilityTable t = probability_table(c.scenario);
    const WitnessReport r = analyze(t);
    std::ostringstream table;
    io::write_table_csv(table, t, &c.scenario);
    write_file(c.outputs / "table.csv", table.str());
    write_file(c.outputs / "bars.csv", bar_chart_csv(t, c.scenario));
    write_report(c.outputs, r);
    print_report(log, r);
    return r;
}

/// Finite run: sampled counts, estimated table, bootstrap report.
inline WitnessReport cmd_simulate(const RunConfig& c, std::ostream& log = std::cout) {
    ensure_dir(c.outputs);
    const Scenario& s = c.scenario;
    // Trials are drawn per heralded pair, no-clicks included; postselection
    // happens in the estimator.
    const ProbabilityTable raw = probability_table(s.with(s.visibility(), s.efficiency(), false));
    const CountTable counts = sample(raw, c.plan);
    const ProbabilityTable est = estimate(counts, s.fair_sampling());
    const WitnessReport r = bootstrap_report(counts, c.resamples, bootstrap_seed(c.plan.seed), s.fair_sampling());

    std::ostringstream counts_csv, est_csv;
    io::write_counts_csv(counts_csv, counts);
    io::write_table_csv(est_csv, est, &s);
    write_file(c.outputs / "counts.csv", counts_csv.str());
    write_file(c.outputs / "estimate.csv", est_csv.str());
    write_file(c.outputs / "bars.csv", bar_chart_csv(est, s));
    write_report(c.outputs, r);
    print_report(log, r);
    return r;
}

/// Bootstrap report of externally recorded (or previously simulated) counts.
inline WitnessReport cmd_report(const fs::path& counts_csv, std::size_t resamples, std::uint64_t seed,
                                bool fair_sampling, const fs::path& out, std::ostream& log = std::cout) {
    std::istringstream in(read_file(counts_csv));
    const CountTable counts = io::read_counts_csv(in);
    ensure_dir(out);
    const WitnessReport r = bootstrap_report(counts, resamples, bootstrap_seed(seed), fair_sampling);
    write_report(out, r);
    print_report(log, r);
    return r;
}

enum class WitnessKind { idw, det };

struct BoundsRequest {
    std::size_t dimension = 2;
    WitnessKind kind = WitnessKind::idw;
    std::uint64_t seed = 0;
    std::size_t restarts = 10'000;
    Randomness randomness = Randomness::independent;
    fs::path out = "out";
};

/// Classical bound with the argmax strategy; for linear witnesses also a
/// certificate listing the value of every enumerated strategy.
inline io::Json cmd_bounds(const BoundsRequest& q, std::ostream& log = std::cout) {
    ensure_dir(q.out);
    io::Json j;
    j["dimension"] = q.dimension;
    if (q.kind == WitnessKind::idw) {
        const LinearWitness w = LinearWitness::dimension_witness();
        const LinearBound b = classical_max_linear(w, q.dimension);
        j["witness"] = "I_DW";
        j["value"] = b.value;
        j["strategies_checked"] = b.strategies_checked;
        j["argmax"] = io::to_json(b.argmax);

        const StrategySpace space(q.dimension, w.n_prep(), w.n_meas());
        std::ostringstream cert;
        cert << "index,encode,decode,value\n";
        for (std::uint64_t k = 0; k < space.size(); ++k) {
            const DeterministicStrategy s = space.at(k);
            std::string enc, dec;
            for (std::size_t m : s.encode) enc += std::to_string(m);
            for (Outcome o : s.decode) dec += o == Outcome::e ? 'e' : 'd';
            cert << k << ',' << enc << ',' << dec << ',' << io::format_double(w.evaluate(s)) << '\n';
        }
        write_file(q.out / "certificate.csv", cert.str());
        log << "max I_DW over " << b.strategies_checked << " deterministic strategies of dimension " << q.dimension
            << " = " << io::format_double(b.value) << "\n";
    } else {
        DetSearchOptions opt;
        opt.seed = q.seed;
        opt.restarts = q.restarts;
        opt.randomness = q.randomness;
        const DetBound b = classical_max_det(q.dimension, opt);
        j["witness"] = "det";
        j["randomness"] = q.randomness == Randomness::independent ? "independent" : "shared";
        j["value"] = b.value;
        j["vertex_value"] = b.vertex_value;
        j["mixture_value"] = b.mixture_value;
        j["strategies_checked"] = b.vertices_checked;
        j["restarts"] = b.restarts;
        j["seed"] = q.seed;
        j["argmax"] = io::to_json(b.best_vertex);
        j["best_mixture"] = io::to_json(b.best_mixture);
        log << "max |det W| over " << b.vertices_checked << " deterministic strategies of dimension " << q.dimension
            << " = " << io::format_double(b.vertex_value) << "; best mixture (" << b.restarts << " restarts, "
            << (q.randomness == Randomness::independent ? "independent" : "shared") << " randomness) = "
            << io::format_double(b.mixture_value) << "\n";
    }
    write_file(q.out / "bound.json", j.dump(2) + "\n");
    return j;
}

/// Returns kOk when every condition holds, kValidationFailure otherwise.
inline int cmd_spacetime(const Schedule& s, const fs::path& out, std::ostream& log = std::cout) {
    const ValidationReport r = validate(s);
    ensure_dir(out);
    write_file(out / "spacetime.json", io::to_json(r).dump(2) + "\n");
    for (const auto& c : r.conditions) {
        log << c.id << ' ' << (c.passed ? "PASS" : "FAIL") << "  " << c.description << "  [" << c.detail << "]\n";
    }
    return r.all_passed() ? kOk : kValidationFailure;
}

/// Maps a library error to its exit code.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const IoError*>(&e)) {
        return kUsageError;
    }
    if (dynamic_cast<const Error*>(&e)) {
        return kDomainError;
    }
    return kUsageError;
}

}  // namespace mwdce::cli
