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

// Finite-statistics layer: seeded multinomial sampling of a ProbabilityTable,
// frequency estimation, and bootstrap standard errors of the witnesses.
//
// Every random draw comes from std::mt19937_64 seeded by splitmix64 over
// (seed, purpose, resample, cell), so results depend only on the inputs and
// never on how work is split across threads.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "mwdce/error.hpp"
#include "mwdce/scenario.hpp"
#include "mwdce/seed.hpp"
#include "mwdce/witness.hpp"

namespace mwdce {

struct CountCell {
    std::uint64_t n_e = 0;
    std::uint64_t n_d = 0;
    std::uint64_t n_none = 0;

    std::uint64_t n_trials() const noexcept {
        return n_e + n_d + n_none;
    }
    friend bool operator==(const CountCell&, const CountCell&) = default;
};

class CountTable {
   public:
    CountTable() = default;
    CountTable(std::size_t n_prep, std::size_t n_meas) : n_prep_(n_prep), n_meas_(n_meas), cells_(n_prep * n_meas) {
    }

    std::size_t n_prep() const noexcept {
        return n_prep_;
    }
    std::size_t n_meas() const noexcept {
        return n_meas_;
    }
    const CountCell& at(std::size_t i, std::size_t j) const {
        check(i, j);
        return cells_[i * n_meas_ + j];
    }
    CountCell& at(std::size_t i, std::size_t j) {
        check(i, j);
        return cells_[i * n_meas_ + j];
    }

    friend bool operator==(const CountTable&, const CountTable&) = default;

   private:
    void check(std::size_t i, std::size_t j) const {
        if (i >= n_prep_ || j >= n_meas_) {
            throw ShapeError("count cell outside table");
        }
    }
    std::size_t n_prep_ = 0;
    std::size_t n_meas_ = 0;
    std::vector<CountCell> cells_;
};

enum class SettingOrder {
    round_robin,       // every cell gets exactly trials_per_setting trials
    random_per_trial,  // settings drawn uniformly per trial, as by independent QRNGs
};

struct RunPlan {
    std::uint64_t trials_per_setting = 100'000;
    std::uint64_t seed = 0;
    SettingOrder setting_order = SettingOrder::round_robin;

    void validate() const {
        if (trials_per_setting < 1) {
            throw DomainError("trials_per_setting must be >= 1");
        }
    }
};

namespace detail {

enum StreamTag : std::uint64_t { kSampleCell = 1, kSampleOrder = 2, kBootstrap = 3 };

/// Multinomial draw by sequential conditional binomials.
template <class Rng>
std::vector<std::uint64_t> multinomial(std::uint64_t n, std::span<const double> probs, Rng& rng) {
    std::vector<std::uint64_t> out(probs.size(), 0);
    double remaining_p = 1.0;
    std::uint64_t remaining_n = n;
    for (std::size_t k = 0; k + 1 < probs.size() && remaining_n > 0; ++k) {
        double p = std::clamp(probs[k], 0.0, 1.0);
        double q = remaining_p > 0.0 ? std::clamp(p / remaining_p, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::uint64_t> draw(remaining_n, q);
        out[k] = draw(rng);
        remaining_n -= out[k];
        remaining_p -= p;
    }
    if (!probs.empty()) {
        out.back() += remaining_n;
    }
    return out;
}

inline CountCell draw_cell(std::uint64_t n, const Cell& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::array<double, 3> probs{p.p_e, p.p_d, p.p_none};
    auto c = multinomial(n, probs, rng);
    return {c[0], c[1], c[2]};
}

inline double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double stddev(const std::vector<double>& xs) {
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace detail

/// Simulated run of `plan` against the outcome probabilities of `t`.
inline CountTable sample(const ProbabilityTable& t, const RunPlan& plan) {
    plan.validate();
    const std::size_t n_cells = t.n_prep() * t.n_meas();
    std::vector<std::uint64_t> per_cell(n_cells, plan.trials_per_setting);
    if (plan.setting_order == SettingOrder::random_per_trial) {
        std::mt19937_64 rng(detail::derive_seed(plan.seed, detail::kSampleOrder));
        std::vector<double> uniform(n_cells, 1.0 / static_cast<double>(n_cells));
        per_cell = detail::multinomial(plan.trials_per_setting * n_cells, uniform, rng);
    }
    CountTable out(t.n_prep(), t.n_meas());
    for (std::size_t i = 0; i < t.n_prep(); ++i) {
        for (std::size_t j = 0; j < t.n_meas(); ++j) {
            const std::size_t k = i * t.n_meas() + j;
            out.at(i, j) = detail::draw_cell(per_cell[k], t.at(i, j), detail::derive_seed(plan.seed, detail::kSampleCell, 0, k));
        }
    }
    return out;
}

/// Observed frequencies. With fair sampling the denominator is the number of
/// detections n_e + n_d, otherwise the number of trials.
inline ProbabilityTable estimate(const CountTable& c, bool fair_sampling) {
    ProbabilityTable t(c.n_prep(), c.n_meas());
    for (std::size_t i = 0; i < c.n_prep(); ++i) {
        for (std::size_t j = 0; j < c.n_meas(); ++j) {
            const CountCell& n = c.at(i, j);
            if (fair_sampling) {
                const std::uint64_t detected = n.n_e + n.n_d;
                if (detected == 0) {
                    throw InsufficientStatistics(i, j);
                }
                t.at(i, j) = {static_cast<double>(n.n_e) / detected, static_cast<double>(n.n_d) / detected, 0.0};
            } else {
                const std::uint64_t total = n.n_trials();
                if (total == 0) {
                    throw InsufficientStatistics(i, j);
                }
                const double dt = static_cast<double>(total);
                t.at(i, j) = {n.n_e / dt, n.n_d / dt, n.n_none / dt};
            }
        }
    }
    return t;
}

inline constexpr std::size_t kMinResamples = 100;
inline constexpr std::size_t kDefaultResamples = 10'000;

/// Parametric bootstrap of the witnesses: every cell is redrawn as a
/// multinomial of its own trial count at its observed frequencies, the
/// witnesses are recomputed, and their means and standard deviations are
/// reported.
inline WitnessReport bootstrap_report(const CountTable& c, std::size_t resamples, std::uint64_t seed, bool fair_sampling,
                                      unsigned threads = 0) {
    if (resamples < kMinResamples) {
        throw DomainError("bootstrap needs at least " + std::to_string(kMinResamples) + " resamples");
    }
    const ProbabilityTable observed = estimate(c, false);
    estimate(c, fair_sampling);  // surfaces empty postselected cells before resampling
    const bool has_det = c.n_prep() >= 4 && c.n_meas() >= 2;
    if (c.n_prep() < 3 || c.n_meas() < 2) {
        throw ShapeError("bootstrap report needs >= 3 preparations and >= 2 measurements");
    }

    std::vector<double> dets(has_det ? resamples : 0), idws(resamples), rs(resamples);
    unsigned n_threads = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, resamples));
    auto work = [&](unsigned tid) {
        for (std::size_t b = tid; b < resamples; b += n_threads) {
            CountTable redraw(c.n_prep(), c.n_meas());
            for (std::size_t i = 0; i < c.n_prep(); ++i) {
                for (std::size_t j = 0; j < c.n_meas(); ++j) {
                    const std::size_t k = i * c.n_meas() + j;
                    redraw.at(i, j) = detail::draw_cell(c.at(i, j).n_trials(), observed.at(i, j),
                                                        detail::derive_seed(seed, detail::kBootstrap, b, k));
                }
            }
            const ProbabilityTable t = estimate(redraw, fair_sampling);
            if (has_det) {
                dets[b] = determinant_witness(t);
            }
            idws[b] = dimension_witness(t);
            rs[b] = retrocausality(idws[b]);
        }
    };
    if (n_threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back(work, t);
        }
    }

    WitnessReport rep;
    rep.idw = detail::mean(idws);
    rep.r = retrocausality(rep.idw);
    rep.uncertainties.idw = detail::stddev(idws);
    rep.uncertainties.r = detail::stddev(rs);
    if (rep.uncertainties.idw > 0.0) {
        rep.sigma_idw = sigma_violation(rep.idw, rep.uncertainties.idw, kDimensionWitnessBound);
    }
    if (has_det) {
        rep.det_abs = detail::mean(dets);
        rep.uncertainties.det_abs = detail::stddev(dets);
        if (*rep.uncertainties.det_abs > 0.0) {
            rep.sigma_det = sigma_violation(*rep.det_abs, *rep.uncertainties.det_abs, kDeterminantBound);
        }
    }
    return rep;
}

}  // namespace mwdce
