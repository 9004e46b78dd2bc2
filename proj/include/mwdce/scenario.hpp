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

// The prepare-and-measure configuration and its exact outcome probabilities.
//
// Outcome e is the projector onto (|H> + e^{i beta}|V>)/sqrt 2 and outcome d
// onto (|H> - e^{i beta}|V>)/sqrt 2. Loss is a single efficiency eta applied
// per heralded trial; undetected trials land in p_none. Noise is a single
// visibility V scaling the interference term.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mwdce/error.hpp"
#include "mwdce/qcore.hpp"

namespace mwdce {

struct Cell {
    double p_e = 0.0;
    double p_d = 0.0;
    double p_none = 0.0;

    /// <D> = p(e) - p(d)
    double correlator() const noexcept {
        return p_e - p_d;
    }
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Per-setting outcome probabilities, preparation-major.
class ProbabilityTable {
   public:
    ProbabilityTable() = default;
    ProbabilityTable(std::size_t n_prep, std::size_t n_meas)
        : n_prep_(n_prep), n_meas_(n_meas), cells_(n_prep * n_meas) {
    }

    std::size_t n_prep() const noexcept {
        return n_prep_;
    }
    std::size_t n_meas() const noexcept {
        return n_meas_;
    }

    const Cell& at(std::size_t i, std::size_t j) const {
        check(i, j);
        return cells_[i * n_meas_ + j];
    }
    Cell& at(std::size_t i, std::size_t j) {
        check(i, j);
        return cells_[i * n_meas_ + j];
    }

    const std::vector<Cell>& cells() const noexcept {
        return cells_;
    }

    /// Largest deviation of p_e + p_d + p_none from 1, or of any entry from [0,1].
    double max_normalization_error() const {
        double worst = 0.0;
        for (const auto& c : cells_) {
            worst = std::max(worst, std::abs(c.p_e + c.p_d + c.p_none - 1.0));
            for (double p : {c.p_e, c.p_d, c.p_none}) {
                worst = std::max(worst, std::max(-p, p - 1.0));
            }
        }
        return worst;
    }

    friend bool operator==(const ProbabilityTable&, const ProbabilityTable&) = default;

   private:
    void check(std::size_t i, std::size_t j) const {
        if (i >= n_prep_ || j >= n_meas_) {
            throw ShapeError("cell (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") outside a " + std::to_string(n_prep_) + "x" + std::to_string(n_meas_) +
                             " table");
        }
    }

    std::size_t n_prep_ = 0;
    std::size_t n_meas_ = 0;
    std::vector<Cell> cells_;
};

/// Largest element-wise absolute difference of two equally shaped tables.
inline double max_abs_difference(const ProbabilityTable& a, const ProbabilityTable& b) {
    if (a.n_prep() != b.n_prep() || a.n_meas() != b.n_meas()) {
        throw ShapeError("tables differ in shape");
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < a.cells().size(); ++k) {
        const Cell& x = a.cells()[k];
        const Cell& y = b.cells()[k];
        worst = std::max({worst, std::abs(x.p_e - y.p_e), std::abs(x.p_d - y.p_d), std::abs(x.p_none - y.p_none)});
    }
    return worst;
}

/// Conditions the table on a detection: p_none = 0, p_e + p_d = 1.
inline ProbabilityTable postselect(const ProbabilityTable& t) {
    ProbabilityTable out(t.n_prep(), t.n_meas());
    for (std::size_t i = 0; i < t.n_prep(); ++i) {
        for (std::size_t j = 0; j < t.n_meas(); ++j) {
            const Cell& c = t.at(i, j);
            double detected = c.p_e + c.p_d;
            if (!(detected > 0.0)) {
                throw InsufficientStatistics(i, j);
            }
            out.at(i, j) = {c.p_e / detected, c.p_d / detected, 0.0};
        }
    }
    return out;
}

inline void check_visibility(double visibility) {
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw DomainError("visibility must lie in [0, 1], got " + std::to_string(visibility));
    }
}

inline void check_efficiency(double efficiency) {
    if (!(efficiency > 0.0 && efficiency <= 1.0)) {
        throw DomainError("efficiency must lie in (0, 1], got " + std::to_string(efficiency));
    }
}

class Scenario {
   public:
    Scenario(std::vector<Phase> alphas, std::vector<Phase> betas, double visibility = 1.0,
             double efficiency = 1.0, bool fair_sampling = true)
        : alphas_(std::move(alphas)),
          betas_(std::move(betas)),
          visibility_(visibility),
          efficiency_(efficiency),
          fair_sampling_(fair_sampling) {
        if (alphas_.empty() || betas_.empty()) {
            throw DomainError("scenario needs at least one preparation and one measurement setting");
        }
        check_visibility(visibility_);
        check_efficiency(efficiency_);
    }

    /// alpha in {0, pi, -pi/2, pi/2}, beta in {pi/2, 0}: the determinant witness settings.
    static Scenario determinant_settings(double visibility = 1.0, double efficiency = 1.0,
                                         bool fair_sampling = true) {
        return Scenario({Phase::from_pi(0.0), Phase::from_pi(1.0), Phase::from_pi(-0.5), Phase::from_pi(0.5)},
                        {Phase::from_pi(0.5), Phase::from_pi(0.0)}, visibility, efficiency, fair_sampling);
    }

    /// alpha in {pi/4, 3pi/4, -pi/2}, beta in {pi/2, 0}: the I_DW settings.
    static Scenario dimension_witness_settings(double visibility = 1.0, double efficiency = 1.0,
                                               bool fair_sampling = true) {
        return Scenario({Phase::from_pi(0.25), Phase::from_pi(0.75), Phase::from_pi(-0.5)},
                        {Phase::from_pi(0.5), Phase::from_pi(0.0)}, visibility, efficiency, fair_sampling);
    }

    const std::vector<Phase>& alphas() const noexcept {
        return alphas_;
    }
    const std::vector<Phase>& betas() const noexcept {
        return betas_;
    }
    double visibility() const noexcept {
        return visibility_;
    }
    double efficiency() const noexcept {
        return efficiency_;
    }
    bool fair_sampling() const noexcept {
        return fair_sampling_;
    }

    Scenario with(double visibility, double efficiency, bool fair_sampling) const {
        return Scenario(alphas_, betas_, visibility, efficiency, fair_sampling);
    }

   private:
    std::vector<Phase> alphas_;
    std::vector<Phase> betas_;
    double visibility_;
    double efficiency_;
    bool fair_sampling_;
};

/// p_e = eta (1 + V cos(alpha - beta)) / 2, p_d = eta (1 - V cos(alpha - beta)) / 2, p_none = 1 - eta.
inline Cell quantum_cell(Phase alpha, Phase beta, double visibility, double efficiency) {
    check_visibility(visibility);
    check_efficiency(efficiency);
    const double fringe = visibility * std::cos(alpha.radians() - beta.radians());
    return {efficiency * 0.5 * (1.0 + fringe), efficiency * 0.5 * (1.0 - fringe), 1.0 - efficiency};
}

inline ProbabilityTable probability_table(const Scenario& s) {
    ProbabilityTable t(s.alphas().size(), s.betas().size());
    for (std::size_t i = 0; i < t.n_prep(); ++i) {
        for (std::size_t j = 0; j < t.n_meas(); ++j) {
            t.at(i, j) = quantum_cell(s.alphas()[i], s.betas()[j], s.visibility(), s.efficiency());
        }
    }
    return s.fair_sampling() ? postselect(t) : t;
}

/// Same contract as probability_table, but each preparation is made by
/// heralding on Alice's half of `pair` and Bob's statistics come from the
/// Born rule on his conditional state. White noise of weight 1 - V is mixed in
/// before the loss.
inline ProbabilityTable heralded_table(const Scenario& s, const Ket4& pair) {
    ProbabilityTable t(s.alphas().size(), s.betas().size());
    const double v = s.visibility();
    const double eta = s.efficiency();
    for (std::size_t i = 0; i < t.n_prep(); ++i) {
        const HeraldSetting setting = herald_setting(s.alphas()[i]);
        const Ket2 bob = herald(pair, setting.alice_phase, setting.sign).bob;
        for (std::size_t j = 0; j < t.n_meas(); ++j) {
            const Phase beta = s.betas()[j];
            double e = born(bob, phase_ket(beta));
            double d = born(bob, phase_ket(Phase(beta.radians() + kPi)));
            t.at(i, j) = {eta * (v * e + 0.5 * (1.0 - v)), eta * (v * d + 0.5 * (1.0 - v)), 1.0 - eta};
        }
    }
    return s.fair_sampling() ? postselect(t) : t;
}

}  // namespace mwdce
