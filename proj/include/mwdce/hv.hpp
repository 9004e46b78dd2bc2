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

// Causal classical hidden-variable models of a prepare-and-measure device.
//
// A deterministic strategy sends message m = encode[i] in {0..d-1} for
// preparation i, and the measurement device answers decode(m, j). Mixtures
// over strategies model shared randomness. Bounds of linear witnesses are
// exact by enumeration of the vertices; the determinant is not linear, so
// its bound is additionally searched over mixtures.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "mwdce/error.hpp"
#include "mwdce/scenario.hpp"
#include "mwdce/seed.hpp"
#include "mwdce/witness.hpp"

namespace mwdce {

enum class Outcome : std::uint8_t { e, d };

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

struct DeterministicStrategy {
    std::size_t dimension = 1;
    std::vector<std::size_t> encode;  // preparation -> message
    std::vector<Outcome> decode;      // message-major: decode[m * n_meas + j]

    std::size_t n_prep() const noexcept {
        return encode.size();
    }
    std::size_t n_meas() const noexcept {
        return dimension == 0 ? 0 : decode.size() / dimension;
    }

    /// Throws ShapeError unless encode and decode are total and in range.
    void validate() const {
        if (dimension == 0) {
            throw ShapeError("strategy message dimension must be >= 1");
        }
        if (decode.size() % dimension != 0) {
            throw ShapeError("decoder must define an outcome for every (message, setting)");
        }
        for (std::size_t m : encode) {
            if (m >= dimension) {
                throw ShapeError("encoder sends message " + std::to_string(m) + " outside dimension " +
                                 std::to_string(dimension));
            }
        }
    }

    Outcome outcome(std::size_t i, std::size_t j) const {
        if (i >= n_prep() || j >= n_meas()) {
            throw ShapeError("strategy queried outside its settings");
        }
        return decode[encode[i] * n_meas() + j];
    }

    friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;
};

struct WeightedStrategy {
    double weight;
    DeterministicStrategy strategy;
    friend bool operator==(const WeightedStrategy&, const WeightedStrategy&) = default;
};

/// Convex combination of deterministic strategies (shared randomness).
struct MixedStrategy {
    std::vector<WeightedStrategy> components;

    static MixedStrategy pure(DeterministicStrategy s) {
        return {{{1.0, std::move(s)}}};
    }

    void validate() const {
        if (components.empty()) {
            throw DomainError("mixed strategy has no components");
        }
        double total = 0.0;
        for (const auto& c : components) {
            if (!(c.weight >= 0.0)) {
                throw DomainError("mixture weights must be non-negative");
            }
            c.strategy.validate();
            total += c.weight;
        }
        if (std::abs(total - 1.0) > kNormTolerance) {
            throw DomainError("mixture weights sum to " + std::to_string(total) + ", not 1");
        }
    }

    friend bool operator==(const MixedStrategy&, const MixedStrategy&) = default;
};

inline ProbabilityTable strategy_table(const DeterministicStrategy& s, std::size_t n_prep, std::size_t n_meas) {
    s.validate();
    if (n_prep > s.n_prep() || n_meas > s.n_meas()) {
        throw ShapeError("strategy defined on " + std::to_string(s.n_prep()) + "x" + std::to_string(s.n_meas()) +
                         " settings, asked for " + std::to_string(n_prep) + "x" + std::to_string(n_meas));
    }
    ProbabilityTable t(n_prep, n_meas);
    for (std::size_t i = 0; i < n_prep; ++i) {
        for (std::size_t j = 0; j < n_meas; ++j) {
            t.at(i, j) = s.outcome(i, j) == Outcome::e ? Cell{1.0, 0.0, 0.0} : Cell{0.0, 1.0, 0.0};
        }
    }
    return t;
}

inline ProbabilityTable strategy_table(const MixedStrategy& s, std::size_t n_prep, std::size_t n_meas) {
    s.validate();
    ProbabilityTable t(n_prep, n_meas);
    for (const auto& c : s.components) {
        ProbabilityTable part = strategy_table(c.strategy, n_prep, n_meas);
        for (std::size_t i = 0; i < n_prep; ++i) {
            for (std::size_t j = 0; j < n_meas; ++j) {
                t.at(i, j).p_e += c.weight * part.at(i, j).p_e;
                t.at(i, j).p_d += c.weight * part.at(i, j).p_d;
            }
        }
    }
    return t;
}

namespace detail {

inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, bool& overflow) {
    std::uint64_t r = 1;
    for (std::uint64_t k = 0; k < exp; ++k) {
        if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) {
            overflow = true;
            return std::numeric_limits<std::uint64_t>::max();
        }
        r *= base;
    }
    return r;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, bool& overflow) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
        overflow = true;
        return std::numeric_limits<std::uint64_t>::max();
    }
    return a * b;
}

}  // namespace detail

/// Every deterministic strategy of message dimension d on n_prep x n_meas
/// settings, addressable by index: index = encoder * n_decoders + decoder.
/// Encoders are read base d (preparation 0 least significant); decoder bit
/// m * n_meas + j set means outcome d.
class StrategySpace {
   public:
    StrategySpace(std::size_t dimension, std::size_t n_prep, std::size_t n_meas,
                  std::uint64_t cap = kDefaultEnumerationCap)
        : dimension_(dimension), n_prep_(n_prep), n_meas_(n_meas) {
        if (dimension == 0) {
            throw DomainError("message dimension must be >= 1");
        }
        bool overflow = false;
        n_encoders_ = detail::checked_pow(dimension, n_prep, overflow);
        std::uint64_t bits = detail::checked_mul(dimension, n_meas, overflow);
        n_decoders_ = bits >= 64 ? (overflow = true, std::numeric_limits<std::uint64_t>::max())
                                 : (std::uint64_t{1} << bits);
        size_ = detail::checked_mul(n_encoders_, n_decoders_, overflow);
        if (overflow || size_ > cap) {
            throw EnumerationCapExceeded(size_, cap);
        }
    }

    std::uint64_t size() const noexcept {
        return size_;
    }
    std::uint64_t n_encoders() const noexcept {
        return n_encoders_;
    }
    std::uint64_t n_decoders() const noexcept {
        return n_decoders_;
    }
    std::size_t dimension() const noexcept {
        return dimension_;
    }
    std::size_t n_prep() const noexcept {
        return n_prep_;
    }
    std::size_t n_meas() const noexcept {
        return n_meas_;
    }

    DeterministicStrategy at(std::uint64_t index) const {
        if (index >= size_) {
            throw ShapeError("strategy index out of range");
        }
        DeterministicStrategy s;
        s.dimension = dimension_;
        s.encode = encoder(index / n_decoders_);
        s.decode = decoder(index % n_decoders_);
        return s;
    }

    std::vector<std::size_t> encoder(std::uint64_t e) const {
        std::vector<std::size_t> enc(n_prep_);
        for (std::size_t i = 0; i < n_prep_; ++i) {
            enc[i] = static_cast<std::size_t>(e % dimension_);
            e /= dimension_;
        }
        return enc;
    }

    std::vector<Outcome> decoder(std::uint64_t f) const {
        std::vector<Outcome> dec(dimension_ * n_meas_);
        for (std::size_t b = 0; b < dec.size(); ++b) {
            dec[b] = ((f >> b) & 1u) ? Outcome::d : Outcome::e;
        }
        return dec;
    }

    class iterator {
       public:
        using iterator_category = std::input_iterator_tag;
        using value_type = DeterministicStrategy;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        iterator(const StrategySpace* space, std::uint64_t index) : space_(space), index_(index) {
        }
        DeterministicStrategy operator*() const {
            return space_->at(index_);
        }
        iterator& operator++() {
            ++index_;
            return *this;
        }
        iterator operator++(int) {
            iterator old = *this;
            ++index_;
            return old;
        }
        friend bool operator==(const iterator& a, const iterator& b) {
            return a.index_ == b.index_;
        }

       private:
        const StrategySpace* space_ = nullptr;
        std::uint64_t index_ = 0;
    };

    iterator begin() const {
        return {this, 0};
    }
    iterator end() const {
        return {this, size_};
    }

   private:
    std::size_t dimension_;
    std::size_t n_prep_;
    std::size_t n_meas_;
    std::uint64_t n_encoders_ = 0;
    std::uint64_t n_decoders_ = 0;
    std::uint64_t size_ = 0;
};

inline StrategySpace enumerate_deterministic(std::size_t dimension, std::size_t n_prep, std::size_t n_meas,
                                             std::uint64_t cap = kDefaultEnumerationCap) {
    return StrategySpace(dimension, n_prep, n_meas, cap);
}

/// A functional sum_ij (c_e[ij] p(e|i,j) + c_d[ij] p(d|i,j)) over a table.
class LinearWitness {
   public:
    LinearWitness(std::size_t n_prep, std::size_t n_meas)
        : n_prep_(n_prep), n_meas_(n_meas), coef_e_(n_prep * n_meas, 0.0), coef_d_(n_prep * n_meas, 0.0) {
    }

    /// I_DW = <D00> + <D01> + <D10> - <D11> - <D20>
    static LinearWitness dimension_witness() {
        LinearWitness w(3, 2);
        w.add_correlator(0, 0, 1.0);
        w.add_correlator(0, 1, 1.0);
        w.add_correlator(1, 0, 1.0);
        w.add_correlator(1, 1, -1.0);
        w.add_correlator(2, 0, -1.0);
        return w;
    }

    /// Adds sign * (p(e|i,j) - p(d|i,j)).
    LinearWitness& add_correlator(std::size_t i, std::size_t j, double sign) {
        coef_e_.at(i * n_meas_ + j) += sign;
        coef_d_.at(i * n_meas_ + j) -= sign;
        return *this;
    }
    LinearWitness& set(std::size_t i, std::size_t j, double on_e, double on_d) {
        coef_e_.at(i * n_meas_ + j) = on_e;
        coef_d_.at(i * n_meas_ + j) = on_d;
        return *this;
    }

    std::size_t n_prep() const noexcept {
        return n_prep_;
    }
    std::size_t n_meas() const noexcept {
        return n_meas_;
    }
    double coef_e(std::size_t i, std::size_t j) const {
        return coef_e_.at(i * n_meas_ + j);
    }
    double coef_d(std::size_t i, std::size_t j) const {
        return coef_d_.at(i * n_meas_ + j);
    }

    double evaluate(const ProbabilityTable& t) const {
        if (t.n_prep() < n_prep_ || t.n_meas() < n_meas_) {
            throw ShapeError("table smaller than the witness");
        }
        double v = 0.0;
        for (std::size_t i = 0; i < n_prep_; ++i) {
            for (std::size_t j = 0; j < n_meas_; ++j) {
                v += coef_e(i, j) * t.at(i, j).p_e + coef_d(i, j) * t.at(i, j).p_d;
            }
        }
        return v;
    }

    double evaluate(const DeterministicStrategy& s) const {
        double v = 0.0;
        for (std::size_t i = 0; i < n_prep_; ++i) {
            for (std::size_t j = 0; j < n_meas_; ++j) {
                v += s.outcome(i, j) == Outcome::e ? coef_e(i, j) : coef_d(i, j);
            }
        }
        return v;
    }

   private:
    std::size_t n_prep_;
    std::size_t n_meas_;
    std::vector<double> coef_e_;
    std::vector<double> coef_d_;
};

struct LinearBound {
    double value;
    DeterministicStrategy argmax;
    std::uint64_t strategies_checked;
};

/// Exact classical maximum of a linear witness. Convexity puts the optimum of
/// every mixture on a vertex, so the vertex enumeration is the full answer.
inline LinearBound classical_max_linear(const LinearWitness& w, std::size_t dimension,
                                        std::uint64_t cap = kDefaultEnumerationCap) {
    StrategySpace space(dimension, w.n_prep(), w.n_meas(), cap);
    LinearBound best{-std::numeric_limits<double>::infinity(), {}, 0};
    for (std::uint64_t k = 0; k < space.size(); ++k) {
        DeterministicStrategy s = space.at(k);
        double v = w.evaluate(s);
        if (v > best.value) {
            best.value = v;
            best.argmax = std::move(s);
        }
        ++best.strategies_checked;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Determinant bound.

/// How the two devices may share randomness when the determinant is searched.
enum class Randomness {
    /// Preparation and measurement devices draw independent randomness; the
    /// setting the determinant witness certifies.
    independent,
    /// One common random variable drives both devices.
    shared,
};

struct DetSearchOptions {
    std::size_t n_prep = 4;
    std::size_t n_meas = 2;
    std::size_t restarts = 10'000;
    std::size_t steps_per_restart = 64;
    std::size_t initial_support = 8;
    std::uint64_t seed = 0;
    Randomness randomness = Randomness::independent;
    std::uint64_t cap = kDefaultEnumerationCap;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct DetBound {
    double value;           // max(vertex_value, mixture_value)
    double vertex_value;    // exact maximum over deterministic strategies
    double mixture_value;   // best |det W| found by the mixture search
    DeterministicStrategy best_vertex;
    MixedStrategy best_mixture;
    std::uint64_t vertices_checked;
    std::size_t restarts;
};

namespace detail {

/// Sparse point on a probability simplex.
struct SparseSimplex {
    std::vector<std::uint64_t> index;
    std::vector<double> weight;

    double get(std::uint64_t i) const {
        for (std::size_t k = 0; k < index.size(); ++k) {
            if (index[k] == i) {
                return weight[k];
            }
        }
        return 0.0;
    }
    void add(std::uint64_t i, double dw) {
        for (std::size_t k = 0; k < index.size(); ++k) {
            if (index[k] == i) {
                weight[k] = std::max(weight[k] + dw, 0.0);
                return;
            }
        }
        if (dw > 0.0) {
            index.push_back(i);
            weight.push_back(dw);
        }
    }
    void prune() {
        std::size_t out = 0;
        for (std::size_t k = 0; k < index.size(); ++k) {
            if (weight[k] > 0.0) {
                index[out] = index[k];
                weight[out] = weight[k];
                ++out;
            }
        }
        index.resize(out);
        weight.resize(out);
    }

    template <class Rng>
    static SparseSimplex random(std::uint64_t size, std::size_t support, Rng& rng) {
        SparseSimplex x;
        std::uniform_int_distribution<std::uint64_t> pick(0, size - 1);
        std::exponential_distribution<double> gamma1(1.0);
        double total = 0.0;
        for (std::size_t k = 0; k < support; ++k) {
            double w = gamma1(rng);
            x.add(pick(rng), w);
            total += w;
        }
        for (double& w : x.weight) {
            w /= total;
        }
        return x;
    }
};

/// Best t in [lo, hi] for |det(W + t D)|, a quadratic in t.
inline double best_step(const Matrix2& w, const Matrix2& dir, double lo, double hi) {
    const double c0 = determinant(w);
    const double c1 = w[0][0] * dir[1][1] + dir[0][0] * w[1][1] - w[0][1] * dir[1][0] - dir[0][1] * w[1][0];
    const double c2 = determinant(dir);
    auto f = [&](double t) { return std::abs(c0 + t * (c1 + t * c2)); };
    double best_t = 0.0;
    double best = f(0.0);
    auto consider = [&](double t) {
        if (t >= lo && t <= hi && f(t) > best) {
            best = f(t);
            best_t = t;
        }
    };
    consider(lo);
    consider(hi);
    if (c2 != 0.0) {
        consider(-c1 / (2.0 * c2));
    }
    return best_t;
}

/// Determinant-witness geometry of a StrategySpace: decoded encoders and
/// decoder bits, with W of a deterministic pair computed without tables.
class DetGeometry {
   public:
    explicit DetGeometry(const StrategySpace& space) : space_(space) {
    }

    std::size_t message(std::uint64_t encoder, std::size_t prep) const {
        std::uint64_t e = encoder;
        for (std::size_t i = 0; i < prep; ++i) {
            e /= space_.dimension();
        }
        return static_cast<std::size_t>(e % space_.dimension());
    }
    double says_d(std::uint64_t decoder, std::size_t m, std::size_t l) const {
        return static_cast<double>((decoder >> (m * space_.n_meas() + l)) & 1u);
    }

    Matrix2 vertex(std::uint64_t encoder, std::uint64_t decoder) const {
        Matrix2 w{};
        for (std::size_t k = 0; k < 2; ++k) {
            for (std::size_t l = 0; l < 2; ++l) {
                w[k][l] = says_d(decoder, message(encoder, 2 * k), l) - says_d(decoder, message(encoder, 2 * k + 1), l);
            }
        }
        return w;
    }

    const StrategySpace& space() const noexcept {
        return space_;
    }

   private:
    const StrategySpace& space_;
};

struct SearchPoint {
    double value = -1.0;
    SparseSimplex first;   // encoders (independent) or joint strategies (shared)
    SparseSimplex second;  // decoders (independent only)
};

template <class Rng>
std::uint64_t pick_other(std::uint64_t size, std::uint64_t avoid, Rng& rng) {
    std::uniform_int_distribution<std::uint64_t> pick(0, size - 2);
    std::uint64_t i = pick(rng);
    return i >= avoid ? i + 1 : i;
}

inline SearchPoint search_independent(const DetGeometry& g, const DetSearchOptions& opt, std::uint64_t restart) {
    const StrategySpace& sp = g.space();
    const std::size_t d = sp.dimension();
    std::mt19937_64 rng(derive_seed(opt.seed, 0xde7, restart));

    SparseSimplex enc = SparseSimplex::random(sp.n_encoders(), opt.initial_support, rng);
    SparseSimplex dec = SparseSimplex::random(sp.n_decoders(), opt.initial_support, rng);

    // Pdiff[k][m] = P(m | 2k) - P(m | 2k+1);  M[m][l] = P(d | m, l)
    std::vector<std::array<double, 2>> pdiff(d), mprob(d);
    auto refresh = [&] {
        for (auto& row : pdiff) row = {0.0, 0.0};
        for (auto& row : mprob) row = {0.0, 0.0};
        for (std::size_t k = 0; k < enc.index.size(); ++k) {
            for (std::size_t r = 0; r < 2; ++r) {
                pdiff[g.message(enc.index[k], 2 * r)][r] += enc.weight[k];
                pdiff[g.message(enc.index[k], 2 * r + 1)][r] -= enc.weight[k];
            }
        }
        for (std::size_t k = 0; k < dec.index.size(); ++k) {
            for (std::size_t m = 0; m < d; ++m) {
                for (std::size_t l = 0; l < 2; ++l) {
                    mprob[m][l] += dec.weight[k] * g.says_d(dec.index[k], m, l);
                }
            }
        }
    };
    auto current = [&] {
        Matrix2 w{};
        for (std::size_t r = 0; r < 2; ++r) {
            for (std::size_t l = 0; l < 2; ++l) {
                for (std::size_t m = 0; m < d; ++m) {
                    w[r][l] += pdiff[m][r] * mprob[m][l];
                }
            }
        }
        return w;
    };

    refresh();
    std::bernoulli_distribution which(0.5);
    for (std::size_t step = 0; step < opt.steps_per_restart; ++step) {
        const bool move_encoder = which(rng);
        SparseSimplex& x = move_encoder ? enc : dec;
        const std::uint64_t size = move_encoder ? sp.n_encoders() : sp.n_decoders();
        if (size < 2) {
            continue;
        }
        std::uniform_int_distribution<std::size_t> from_support(0, x.index.size() - 1);
        const std::uint64_t from = x.index[from_support(rng)];
        const std::uint64_t to = pick_other(size, from, rng);

        Matrix2 dir{};
        for (std::size_t r = 0; r < 2; ++r) {
            for (std::size_t l = 0; l < 2; ++l) {
                if (move_encoder) {
                    dir[r][l] = (mprob[g.message(to, 2 * r)][l] - mprob[g.message(to, 2 * r + 1)][l]) -
                                (mprob[g.message(from, 2 * r)][l] - mprob[g.message(from, 2 * r + 1)][l]);
                } else {
                    for (std::size_t m = 0; m < d; ++m) {
                        dir[r][l] += pdiff[m][r] * (g.says_d(to, m, l) - g.says_d(from, m, l));
                    }
                }
            }
        }
        const double t = best_step(current(), dir, -x.get(to), x.get(from));
        if (t != 0.0) {
            x.add(from, -t);
            x.add(to, t);
            x.prune();
            refresh();
        }
    }
    return {std::abs(determinant(current())), std::move(enc), std::move(dec)};
}

inline SearchPoint search_shared(const DetGeometry& g, const DetSearchOptions& opt, std::uint64_t restart) {
    const StrategySpace& sp = g.space();
    const std::uint64_t n_dec = sp.n_decoders();
    std::mt19937_64 rng(derive_seed(opt.seed, 0x5a7ed, restart));
    auto vertex = [&](std::uint64_t s) { return g.vertex(s / n_dec, s % n_dec); };

    SparseSimplex x = SparseSimplex::random(sp.size(), opt.initial_support, rng);
    auto current = [&] {
        Matrix2 w{};
        for (std::size_t k = 0; k < x.index.size(); ++k) {
            Matrix2 v = vertex(x.index[k]);
            for (std::size_t r = 0; r < 2; ++r) {
                for (std::size_t l = 0; l < 2; ++l) {
                    w[r][l] += x.weight[k] * v[r][l];
                }
            }
        }
        return w;
    };
    if (sp.size() >= 2) {
        for (std::size_t step = 0; step < opt.steps_per_restart; ++step) {
            std::uniform_int_distribution<std::size_t> from_support(0, x.index.size() - 1);
            const std::uint64_t from = x.index[from_support(rng)];
            const std::uint64_t to = pick_other(sp.size(), from, rng);
            Matrix2 a = vertex(to), b = vertex(from), dir{};
            for (std::size_t r = 0; r < 2; ++r) {
                for (std::size_t l = 0; l < 2; ++l) {
                    dir[r][l] = a[r][l] - b[r][l];
                }
            }
            const double t = best_step(current(), dir, -x.get(to), x.get(from));
            if (t != 0.0) {
                x.add(from, -t);
                x.add(to, t);
                x.prune();
            }
        }
    }
    return {std::abs(determinant(current())), std::move(x), {}};
}

inline MixedStrategy to_mixture(const StrategySpace& sp, const SearchPoint& p, Randomness model) {
    MixedStrategy out;
    auto normalize = [&] {
        double total = 0.0;
        for (const auto& c : out.components) total += c.weight;
        for (auto& c : out.components) c.weight /= total;
    };
    if (model == Randomness::shared) {
        for (std::size_t k = 0; k < p.first.index.size(); ++k) {
            out.components.push_back({p.first.weight[k], sp.at(p.first.index[k])});
        }
    } else {
        for (std::size_t a = 0; a < p.first.index.size(); ++a) {
            for (std::size_t b = 0; b < p.second.index.size(); ++b) {
                DeterministicStrategy s;
                s.dimension = sp.dimension();
                s.encode = sp.encoder(p.first.index[a]);
                s.decode = sp.decoder(p.second.index[b]);
                out.components.push_back({p.first.weight[a] * p.second.weight[b], std::move(s)});
            }
        }
    }
    normalize();
    return out;
}

}  // namespace detail

/// Largest |det W| reachable by a classical model of message dimension d.
///
/// All deterministic strategies are checked exactly. Mixtures are then
/// searched by random-restart coordinate ascent: each step moves weight
/// between two strategies (or two encoders / two decoders in the independent
/// model) along the exact maximizer of the quadratic |det| on that segment.
/// Restart k uses its own derived seed, so the result does not depend on
/// thread scheduling. The search is a heuristic; it can only report what it
/// found.
inline DetBound classical_max_det(std::size_t dimension, const DetSearchOptions& opt = {}) {
    if (dimension < 1) {
        throw DomainError("message dimension must be >= 1");
    }
    if (opt.n_prep < 4 || opt.n_meas < 2) {
        throw ShapeError("determinant witness needs >= 4 preparations and >= 2 measurements");
    }
    if (opt.initial_support == 0) {
        throw DomainError("initial_support must be >= 1");
    }
    StrategySpace space(dimension, opt.n_prep, opt.n_meas, opt.cap);
    detail::DetGeometry geometry(space);

    DetBound out{0.0, -1.0, 0.0, {}, {}, 0, opt.restarts};
    std::uint64_t best_vertex_index = 0;
    for (std::uint64_t e = 0; e < space.n_encoders(); ++e) {
        for (std::uint64_t f = 0; f < space.n_decoders(); ++f) {
            double v = std::abs(determinant(geometry.vertex(e, f)));
            if (v > out.vertex_value) {
                out.vertex_value = v;
                best_vertex_index = e * space.n_decoders() + f;
            }
        }
    }
    out.vertices_checked = space.size();
    out.best_vertex = space.at(best_vertex_index);

    unsigned n_threads = opt.threads != 0 ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(opt.restarts, 1)));
    std::vector<detail::SearchPoint> best(n_threads);
    std::vector<std::size_t> best_restart(n_threads, 0);
    auto work = [&](unsigned tid) {
        for (std::size_t r = tid; r < opt.restarts; r += n_threads) {
            detail::SearchPoint p = opt.randomness == Randomness::independent
                                        ? detail::search_independent(geometry, opt, r)
                                        : detail::search_shared(geometry, opt, r);
            if (p.value > best[tid].value) {
                best[tid] = std::move(p);
                best_restart[tid] = r;
            }
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

    // Merge by value, ties to the lowest restart index.
    std::size_t winner = 0;
    for (std::size_t t = 1; t < n_threads; ++t) {
        if (best[t].value > best[winner].value ||
            (best[t].value == best[winner].value && best_restart[t] < best_restart[winner])) {
            winner = t;
        }
    }
    if (opt.restarts > 0) {
        out.mixture_value = best[winner].value;
        out.best_mixture = detail::to_mixture(space, best[winner], opt.randomness);
    } else {
        out.best_mixture = MixedStrategy::pure(out.best_vertex);
    }
    out.value = std::max(out.vertex_value, out.mixture_value);
    return out;
}

// ---------------------------------------------------------------------------
// Retrocausal models.

/// Strategy of an encoder that knows the measurement setting j: any outcome
/// table is reachable, so the strategy is the table itself.
struct InformedStrategy {
    std::size_t n_prep = 0;
    std::size_t n_meas = 0;
    std::vector<Outcome> outcome;  // preparation-major

    Outcome at(std::size_t i, std::size_t j) const {
        if (i >= n_prep || j >= n_meas) {
            throw ShapeError("informed strategy queried outside its settings");
        }
        return outcome[i * n_meas + j];
    }
    friend bool operator==(const InformedStrategy&, const InformedStrategy&) = default;
};

/// With probability `leak` the encoder learns Bob's setting and plays
/// `informed`; otherwise the causal mixture `base` is played.
struct RetrocausalStrategy {
    MixedStrategy base;
    InformedStrategy informed;
    double leak = 0.0;
};

inline ProbabilityTable informed_table(const InformedStrategy& s) {
    if (s.outcome.size() != s.n_prep * s.n_meas) {
        throw ShapeError("informed strategy must define every (i, j)");
    }
    ProbabilityTable t(s.n_prep, s.n_meas);
    for (std::size_t i = 0; i < s.n_prep; ++i) {
        for (std::size_t j = 0; j < s.n_meas; ++j) {
            t.at(i, j) = s.at(i, j) == Outcome::e ? Cell{1.0, 0.0, 0.0} : Cell{0.0, 1.0, 0.0};
        }
    }
    return t;
}

inline ProbabilityTable retrocausal_table(const RetrocausalStrategy& s, std::size_t n_prep, std::size_t n_meas) {
    if (!(s.leak >= 0.0 && s.leak <= 1.0)) {
        throw DomainError("leak probability must lie in [0, 1]");
    }
    if (n_prep > s.informed.n_prep || n_meas > s.informed.n_meas) {
        throw ShapeError("informed strategy smaller than the requested table");
    }
    ProbabilityTable causal = strategy_table(s.base, n_prep, n_meas);
    ProbabilityTable informed = informed_table(s.informed);
    ProbabilityTable t(n_prep, n_meas);
    for (std::size_t i = 0; i < n_prep; ++i) {
        for (std::size_t j = 0; j < n_meas; ++j) {
            const Cell& a = causal.at(i, j);
            const Cell& b = informed.at(i, j);
            t.at(i, j) = {(1.0 - s.leak) * a.p_e + s.leak * b.p_e, (1.0 - s.leak) * a.p_d + s.leak * b.p_d, 0.0};
        }
    }
    return t;
}

/// Witness value of the given retrocausal strategy (not an optimum).
inline double retrocausal_value(const LinearWitness& w, const RetrocausalStrategy& s) {
    return w.evaluate(retrocausal_table(s, w.n_prep(), w.n_meas()));
}

/// Setting-aware strategy maximizing `w`: each cell takes its better outcome.
inline InformedStrategy best_informed(const LinearWitness& w) {
    InformedStrategy s{w.n_prep(), w.n_meas(), std::vector<Outcome>(w.n_prep() * w.n_meas())};
    for (std::size_t i = 0; i < w.n_prep(); ++i) {
        for (std::size_t j = 0; j < w.n_meas(); ++j) {
            s.outcome[i * w.n_meas() + j] = w.coef_e(i, j) >= w.coef_d(i, j) ? Outcome::e : Outcome::d;
        }
    }
    return s;
}

/// Optimal strategy at leak r: the causal optimum with weight 1 - r and the
/// informed optimum with weight r. Linearity makes this the maximizer.
inline RetrocausalStrategy best_retrocausal(const LinearWitness& w, std::size_t dimension, double leak,
                                            std::uint64_t cap = kDefaultEnumerationCap) {
    return {MixedStrategy::pure(classical_max_linear(w, dimension, cap).argmax), best_informed(w), leak};
}

}  // namespace mwdce
