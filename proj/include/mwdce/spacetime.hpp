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

// Lab-frame causality checks on the event schedule of one experimental trial.
// Positions are meters, times nanoseconds.

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "mwdce/error.hpp"

namespace mwdce {

inline constexpr double kSpeedOfLight = 0.299792458;  // m/ns
inline constexpr double kDefaultFiberSpeed = 0.68;    // fraction of c, group index ~1.47
inline constexpr double kLightLikeTolerance = 1e-6;   // relative, on the interval

struct Event {
    std::string label;
    std::array<double, 3> position{};  // m
    double time = 0.0;                 // ns

    void validate() const {
        if (!std::isfinite(time) || !std::isfinite(position[0]) || !std::isfinite(position[1]) ||
            !std::isfinite(position[2])) {
            throw DomainError("event '" + label + "' has non-finite coordinates");
        }
    }
};

enum class IntervalKind { space_like, time_like, light_like };

inline const char* to_string(IntervalKind k) {
    switch (k) {
        case IntervalKind::space_like:
            return "space-like";
        case IntervalKind::time_like:
            return "time-like";
        case IntervalKind::light_like:
            return "light-like";
    }
    return "?";
}

inline double distance(const Event& a, const Event& b) {
    const double dx = a.position[0] - b.position[0];
    const double dy = a.position[1] - b.position[1];
    const double dz = a.position[2] - b.position[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Classifies by the sign of c^2 dt^2 - |dx|^2. Within kLightLikeTolerance of
/// c^2 dt^2 + |dx|^2 the pair is light-like; coincident events count as
/// time-like.
inline IntervalKind interval(const Event& a, const Event& b) {
    const double ct = kSpeedOfLight * (a.time - b.time);
    const double dx = distance(a, b);
    const double s = ct * ct - dx * dx;
    const double scale = ct * ct + dx * dx;
    if (scale == 0.0) {
        return IntervalKind::time_like;
    }
    if (std::abs(s) < kLightLikeTolerance * scale) {
        return IntervalKind::light_like;
    }
    return s > 0.0 ? IntervalKind::time_like : IntervalKind::space_like;
}

namespace labels {
inline constexpr const char* kPairEmission = "pair_emission";
inline constexpr const char* kAliceChoice = "alice_choice";
inline constexpr const char* kAliceMeasurement = "alice_measurement";
inline constexpr const char* kBobChoice = "bob_choice";
inline constexpr const char* kBobMeasurement = "bob_measurement";
inline constexpr const char* kCharlieAlice = "charlie_alice";
inline constexpr const char* kCharlieBob = "charlie_bob";
}  // namespace labels

/// Events of one trial plus the fiber links from the source.
///
/// `media` maps a link to its signal speed (fraction of c, default 0.68);
/// `fibers` maps it to its length in meters. A link without a length is
/// taken as a straight run between its endpoints.
struct Schedule {
    std::map<std::string, Event> events;
    std::map<std::string, double> media;
    std::map<std::string, double> fibers;

    void add(Event e) {
        std::string key = e.label;
        events[key] = std::move(e);
    }

    const Event& event(const std::string& label) const {
        auto it = events.find(label);
        if (it == events.end()) {
            throw ParseError("schedule is missing required event '" + label + "'");
        }
        return it->second;
    }

    double speed(const std::string& link) const {
        auto it = media.find(link);
        return it == media.end() ? kDefaultFiberSpeed : it->second;
    }

    void validate() const {
        for (const char* l : {labels::kPairEmission, labels::kAliceChoice, labels::kAliceMeasurement, labels::kBobChoice,
                              labels::kBobMeasurement}) {
            event(l).validate();
        }
        for (const auto& [link, v] : media) {
            if (!(v > 0.0 && v <= 1.0)) {
                throw DomainError("signal speed of '" + link + "' must lie in (0, 1], got " + std::to_string(v));
            }
        }
        for (const auto& [link, len] : fibers) {
            if (!(len >= 0.0) || !std::isfinite(len)) {
                throw DomainError("fiber length of '" + link + "' must be finite and >= 0");
            }
        }
    }
};

struct ConditionResult {
    std::string id;
    std::string description;
    bool passed;
    std::string detail;
};

struct ValidationReport {
    std::vector<ConditionResult> conditions;

    bool all_passed() const {
        for (const auto& c : conditions) {
            if (!c.passed) return false;
        }
        return true;
    }
    const ConditionResult& operator[](const std::string& id) const {
        for (const auto& c : conditions) {
            if (c.id == id) return c;
        }
        throw ShapeError("no condition " + id);
    }
};

/// C1  bob_choice space-like from alice_choice and alice_measurement
/// C2  alice_measurement space-like from bob_measurement
/// C3  alice_choice and bob_choice space-like from pair_emission
/// C4  bob_choice later than alice_choice in the lab frame (delayed choice)
/// C5  each measurement no earlier than emission + fiber length / fiber speed
inline ValidationReport validate(const Schedule& s) {
    s.validate();
    const Event& emit = s.event(labels::kPairEmission);
    const Event& ac = s.event(labels::kAliceChoice);
    const Event& am = s.event(labels::kAliceMeasurement);
    const Event& bc = s.event(labels::kBobChoice);
    const Event& bm = s.event(labels::kBobMeasurement);

    auto pair_text = [](const Event& a, const Event& b) {
        return a.label + "/" + b.label + " " + to_string(interval(a, b));
    };
    auto spacelike = [](const Event& a, const Event& b) { return interval(a, b) == IntervalKind::space_like; };

    ValidationReport rep;
    rep.conditions.push_back({"C1", "Bob's choice space-like from Alice's choice and measurement",
                              spacelike(bc, ac) && spacelike(bc, am), pair_text(bc, ac) + "; " + pair_text(bc, am)});
    rep.conditions.push_back(
        {"C2", "Alice's and Bob's measurements space-like", spacelike(am, bm), pair_text(am, bm)});
    rep.conditions.push_back({"C3", "both setting choices outside the light cone of the pair emission",
                              spacelike(ac, emit) && spacelike(bc, emit),
                              pair_text(ac, emit) + "; " + pair_text(bc, emit)});
    rep.conditions.push_back({"C4", "Bob's setting chosen after Alice's", ac.time < bc.time,
                              "alice_choice " + std::to_string(ac.time) + " ns, bob_choice " +
                                  std::to_string(bc.time) + " ns"});

    auto arrival = [&](const Event& meas, const std::string& link) {
        auto it = s.fibers.find(link);
        const double length = it == s.fibers.end() ? distance(emit, meas) : it->second;
        return emit.time + length / (s.speed(link) * kSpeedOfLight);
    };
    const double alice_arrival = arrival(am, labels::kCharlieAlice);
    const double bob_arrival = arrival(bm, labels::kCharlieBob);
    rep.conditions.push_back({"C5", "measurements no earlier than photon arrival through the fibers",
                              am.time >= alice_arrival && bm.time >= bob_arrival,
                              "alice arrival " + std::to_string(alice_arrival) + " ns (measured " +
                                  std::to_string(am.time) + "), bob arrival " + std::to_string(bob_arrival) +
                                  " ns (measured " + std::to_string(bm.time) + ")"});
    return rep;
}

}  // namespace mwdce
