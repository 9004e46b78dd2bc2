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

// Text formats: JSON for configs, reports and strategies; CSV for tables.
//
//   scenario   {"alphas_pi": [..], "betas_pi": [..], "visibility": V,
//               "efficiency": eta, "fair_sampling": bool}     phases in units of pi
//   run plan   {"trials_per_setting": N, "seed": S,
//               "setting_order": "round-robin" | "random-per-trial"}
//   schedule   {"events": [{"label", "xyz_m": [x,y,z], "t_ns"}],
//               "media": {link: speed/c}, "fibers": {link: meters}}
//   counts CSV i,j,n_e,n_d,n_none

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mwdce/error.hpp"
#include "mwdce/hv.hpp"
#include "mwdce/scenario.hpp"
#include "mwdce/spacetime.hpp"
#include "mwdce/trials.hpp"
#include "mwdce/witness.hpp"

namespace mwdce::io {

using Json = nlohmann::ordered_json;

/// Shortest text that reads back to the same double; plain decimal notation
/// for magnitudes in [1e-4, 1e15).
inline std::string format_double(double x) {
    char buf[64];
    const double a = std::abs(x);
    const bool plain = a >= 1e-4 && a < 1e15;
    auto res = plain ? std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed)
                     : std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace detail {

template <class T>
T required(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(where + ": missing key '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + ": key '" + key + "' has the wrong type (" + e.what() + ")");
    }
}

template <class T>
T optional_or(const Json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return fallback;
    }
    return required<T>(j, key, where);
}

inline Json number_or_null(const std::optional<double>& x) {
    return x ? Json(*x) : Json(nullptr);
}

inline std::optional<double> optional_number(const Json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return std::nullopt;
    }
    return required<double>(j, key, "report");
}

}  // namespace detail

inline Json parse_json_text(const std::string& text, const std::string& where) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(where + ": " + e.what());
    }
}

// --- Scenario -------------------------------------------------------------

inline Json to_json(const Scenario& s) {
    Json j;
    Json a = Json::array(), b = Json::array();
    for (const Phase& p : s.alphas()) a.push_back(p.in_pi());
    for (const Phase& p : s.betas()) b.push_back(p.in_pi());
    j["alphas_pi"] = a;
    j["betas_pi"] = b;
    j["visibility"] = s.visibility();
    j["efficiency"] = s.efficiency();
    j["fair_sampling"] = s.fair_sampling();
    return j;
}

inline Scenario scenario_from_json(const Json& j) {
    const std::string where = "scenario";
    auto phases = [&](const char* key) {
        std::vector<Phase> out;
        for (double x : detail::required<std::vector<double>>(j, key, where)) {
            out.push_back(Phase::from_pi(x));
        }
        return out;
    };
    return Scenario(phases("alphas_pi"), phases("betas_pi"), detail::optional_or(j, "visibility", 1.0, where),
                    detail::optional_or(j, "efficiency", 1.0, where), detail::optional_or(j, "fair_sampling", true, where));
}

// --- Run plan -------------------------------------------------------------

inline Json to_json(const RunPlan& p) {
    Json j;
    j["trials_per_setting"] = p.trials_per_setting;
    j["seed"] = p.seed;
    j["setting_order"] = p.setting_order == SettingOrder::round_robin ? "round-robin" : "random-per-trial";
    return j;
}

inline RunPlan plan_from_json(const Json& j) {
    const std::string where = "plan";
    RunPlan p;
    p.trials_per_setting = detail::optional_or<std::uint64_t>(j, "trials_per_setting", p.trials_per_setting, where);
    p.seed = detail::optional_or<std::uint64_t>(j, "seed", p.seed, where);
    const auto order = detail::optional_or<std::string>(j, "setting_order", "round-robin", where);
    if (order == "round-robin") {
        p.setting_order = SettingOrder::round_robin;
    } else if (order == "random-per-trial") {
        p.setting_order = SettingOrder::random_per_trial;
    } else {
        throw ParseError("plan: setting_order must be 'round-robin' or 'random-per-trial', got '" + order + "'");
    }
    p.validate();
    return p;
}

// --- Witness report -------------------------------------------------------

inline Json to_json(const WitnessReport& r) {
    Json j;
    j["det_abs"] = detail::number_or_null(r.det_abs);
    j["I_DW"] = r.idw;
    j["R"] = r.r;
    j["sigma_det"] = detail::number_or_null(r.sigma_det);
    j["sigma_idw"] = detail::number_or_null(r.sigma_idw);
    j["uncertainties"] = {{"det_abs", detail::number_or_null(r.uncertainties.det_abs)},
                          {"I_DW", r.uncertainties.idw},
                          {"R", r.uncertainties.r}};
    return j;
}

inline WitnessReport report_from_json(const Json& j) {
    WitnessReport r;
    r.det_abs = detail::optional_number(j, "det_abs");
    r.idw = detail::required<double>(j, "I_DW", "report");
    r.r = detail::required<double>(j, "R", "report");
    r.sigma_det = detail::optional_number(j, "sigma_det");
    r.sigma_idw = detail::optional_number(j, "sigma_idw");
    const Json& u = j.at("uncertainties");
    r.uncertainties.det_abs = detail::optional_number(u, "det_abs");
    r.uncertainties.idw = detail::required<double>(u, "I_DW", "report uncertainties");
    r.uncertainties.r = detail::required<double>(u, "R", "report uncertainties");
    return r;
}

inline const char* kReportCsvHeader = "det_abs,se_det,sigma_det,I_DW,se_idw,sigma_idw,R,se_R";

/// One flat CSV row; empty fields for absent values.
inline std::string report_csv_row(const WitnessReport& r) {
    auto opt = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
    std::ostringstream os;
    os << opt(r.det_abs) << ',' << opt(r.uncertainties.det_abs) << ',' << opt(r.sigma_det) << ','
       << format_double(r.idw) << ',' << format_double(r.uncertainties.idw) << ',' << opt(r.sigma_idw) << ','
       << format_double(r.r) << ',' << format_double(r.uncertainties.r);
    return os.str();
}

// --- Strategies -----------------------------------------------------------

inline Json to_json(const DeterministicStrategy& s) {
    Json dec = Json::array();
    for (std::size_t m = 0; m < s.dimension; ++m) {
        Json row = Json::array();
        for (std::size_t j = 0; j < s.n_meas(); ++j) {
            row.push_back(s.decode[m * s.n_meas() + j] == Outcome::e ? "e" : "d");
        }
        dec.push_back(row);
    }
    return {{"dimension", s.dimension}, {"encode", s.encode}, {"decode", dec}};
}

inline DeterministicStrategy strategy_from_json(const Json& j) {
    DeterministicStrategy s;
    s.dimension = detail::required<std::size_t>(j, "dimension", "strategy");
    s.encode = detail::required<std::vector<std::size_t>>(j, "encode", "strategy");
    auto rows = detail::required<std::vector<std::vector<std::string>>>(j, "decode", "strategy");
    if (rows.size() != s.dimension) {
        throw ParseError("strategy: decode needs one row per message");
    }
    for (const auto& row : rows) {
        if (row.size() != rows.front().size()) {
            throw ParseError("strategy: decode rows differ in length");
        }
        for (const auto& o : row) {
            if (o != "e" && o != "d") {
                throw ParseError("strategy: outcomes must be \"e\" or \"d\", got \"" + o + "\"");
            }
            s.decode.push_back(o == "e" ? Outcome::e : Outcome::d);
        }
    }
    try {
        s.validate();
    } catch (const ShapeError& e) {
        throw ParseError(std::string("strategy: ") + e.what());
    }
    return s;
}

inline Json to_json(const MixedStrategy& m) {
    Json comps = Json::array();
    for (const auto& c : m.components) {
        comps.push_back({{"weight", c.weight}, {"strategy", to_json(c.strategy)}});
    }
    return {{"components", comps}};
}

inline MixedStrategy mixed_from_json(const Json& j) {
    MixedStrategy m;
    for (const Json& c : detail::required<Json>(j, "components", "mixed strategy")) {
        m.components.push_back({detail::required<double>(c, "weight", "mixture component"),
                                strategy_from_json(detail::required<Json>(c, "strategy", "mixture component"))});
    }
    m.validate();
    return m;
}

// --- Schedule -------------------------------------------------------------

inline Json to_json(const Schedule& s) {
    Json events = Json::array();
    for (const auto& [label, e] : s.events) {
        events.push_back({{"label", label}, {"xyz_m", e.position}, {"t_ns", e.time}});
    }
    Json media = Json::object(), fibers = Json::object();
    for (const auto& [k, v] : s.media) media[k] = v;
    for (const auto& [k, v] : s.fibers) fibers[k] = v;
    return {{"events", events}, {"media", media}, {"fibers", fibers}};
}

inline Schedule schedule_from_json(const Json& j) {
    Schedule s;
    for (const Json& e : detail::required<Json>(j, "events", "schedule")) {
        Event ev;
        ev.label = detail::required<std::string>(e, "label", "schedule event");
        ev.position = detail::required<std::array<double, 3>>(e, "xyz_m", "schedule event '" + ev.label + "'");
        ev.time = detail::required<double>(e, "t_ns", "schedule event '" + ev.label + "'");
        if (s.events.contains(ev.label)) {
            throw ParseError("schedule: duplicate event '" + ev.label + "'");
        }
        s.add(std::move(ev));
    }
    if (j.contains("media")) {
        s.media = detail::required<std::map<std::string, double>>(j, "media", "schedule");
    }
    if (j.contains("fibers")) {
        s.fibers = detail::required<std::map<std::string, double>>(j, "fibers", "schedule");
    }
    return s;
}

inline Json to_json(const ValidationReport& r) {
    Json conds = Json::array();
    for (const auto& c : r.conditions) {
        conds.push_back({{"id", c.id}, {"description", c.description}, {"passed", c.passed}, {"detail", c.detail}});
    }
    return {{"all_passed", r.all_passed()}, {"conditions", conds}};
}

// --- CSV tables -----------------------------------------------------------

inline void write_counts_csv(std::ostream& os, const CountTable& c) {
    os << "i,j,n_e,n_d,n_none\n";
    for (std::size_t i = 0; i < c.n_prep(); ++i) {
        for (std::size_t j = 0; j < c.n_meas(); ++j) {
            const CountCell& n = c.at(i, j);
            os << i << ',' << j << ',' << n.n_e << ',' << n.n_d << ',' << n.n_none << '\n';
        }
    }
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        while (!field.empty() && field.front() == ' ') field.erase(field.begin());
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::uint64_t parse_u64(const std::string& s, std::size_t line_no) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ParseError("counts CSV line " + std::to_string(line_no) + ": '" + s + "' is not a non-negative integer");
    }
    return v;
}

}  // namespace detail

/// Reads a counts CSV. The table shape is inferred from the largest indices and
/// every cell must appear exactly once.
inline CountTable read_counts_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::map<std::pair<std::size_t, std::size_t>, CountCell> cells;
    std::size_t n_prep = 0, n_meas = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = detail::split_csv(line);
        if (!header_seen) {
            if (fields != std::vector<std::string>{"i", "j", "n_e", "n_d", "n_none"}) {
                throw ParseError("counts CSV: header must be 'i,j,n_e,n_d,n_none'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 5) {
            throw ParseError("counts CSV line " + std::to_string(line_no) + ": expected 5 fields");
        }
        const std::size_t i = detail::parse_u64(fields[0], line_no);
        const std::size_t j = detail::parse_u64(fields[1], line_no);
        CountCell c{detail::parse_u64(fields[2], line_no), detail::parse_u64(fields[3], line_no),
                    detail::parse_u64(fields[4], line_no)};
        if (!cells.emplace(std::make_pair(i, j), c).second) {
            throw ParseError("counts CSV: cell (" + std::to_string(i) + ", " + std::to_string(j) + ") repeated");
        }
        n_prep = std::max(n_prep, i + 1);
        n_meas = std::max(n_meas, j + 1);
    }
    if (!header_seen || cells.empty()) {
        throw ParseError("counts CSV is empty");
    }
    if (cells.size() != n_prep * n_meas) {
        throw ParseError("counts CSV: expected all " + std::to_string(n_prep * n_meas) + " cells of a " +
                         std::to_string(n_prep) + "x" + std::to_string(n_meas) + " table, got " +
                         std::to_string(cells.size()));
    }
    CountTable out(n_prep, n_meas);
    for (const auto& [ij, c] : cells) {
        out.at(ij.first, ij.second) = c;
    }
    return out;
}

/// Probabilities with the settings that produced them (phases in units of pi).
inline void write_table_csv(std::ostream& os, const ProbabilityTable& t, const Scenario* s = nullptr) {
    os << "i,j,alpha_pi,beta_pi,p_e,p_d,p_none\n";
    for (std::size_t i = 0; i < t.n_prep(); ++i) {
        for (std::size_t j = 0; j < t.n_meas(); ++j) {
            const Cell& c = t.at(i, j);
            os << i << ',' << j << ',' << (s ? format_double(s->alphas()[i].in_pi()) : "") << ','
               << (s ? format_double(s->betas()[j].in_pi()) : "") << ',' << format_double(c.p_e) << ','
               << format_double(c.p_d) << ',' << format_double(c.p_none) << '\n';
        }
    }
}

}  // namespace mwdce::io
