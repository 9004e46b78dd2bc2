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

// Witnesses evaluated on a ProbabilityTable.
//
// Tables are 0-indexed. The determinant witness pairs preparations {0,1} in
// its first row and {2,3} in its second:
//     W[k][l] = p(d | 2k, l) - p(d | 2k + 1, l),   k, l in {0, 1}.
// The dimension witness is
//     I_DW = <D00> + <D01> + <D10> - <D11> - <D20>,   <Dij> = p(e|i,j) - p(d|i,j).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "mwdce/error.hpp"
#include "mwdce/scenario.hpp"

namespace mwdce {

using Matrix2 = std::array<std::array<double, 2>, 2>;

inline double determinant(const Matrix2& m) noexcept {
    return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

/// Classical bound of I_DW for a causal two-dimensional hidden-variable model.
inline constexpr double kDimensionWitnessBound = 3.0;
/// Classical bound of |det W| for a causal two-dimensional hidden-variable model.
inline constexpr double kDeterminantBound = 0.0;

inline Matrix2 witness_matrix(const ProbabilityTable& t) {
    if (t.n_prep() < 4 || t.n_meas() < 2) {
        throw ShapeError("determinant witness needs >= 4 preparations and >= 2 measurements, table is " +
                         std::to_string(t.n_prep()) + "x" + std::to_string(t.n_meas()));
    }
    Matrix2 w{};
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t l = 0; l < 2; ++l) {
            w[k][l] = t.at(2 * k, l).p_d - t.at(2 * k + 1, l).p_d;
        }
    }
    return w;
}

inline double determinant_witness(const ProbabilityTable& t) {
    return std::abs(determinant(witness_matrix(t)));
}

inline double dimension_witness(const ProbabilityTable& t) {
    if (t.n_prep() < 3 || t.n_meas() < 2) {
        throw ShapeError("dimension witness needs >= 3 preparations and >= 2 measurements, table is " +
                         std::to_string(t.n_prep()) + "x" + std::to_string(t.n_meas()));
    }
    auto D = [&](std::size_t i, std::size_t j) { return t.at(i, j).correlator(); };
    return D(0, 0) + D(0, 1) + D(1, 0) - D(1, 1) - D(2, 0);
}

/// R = max((I_DW - 3) / 4, 0)
inline double retrocausality(double idw) noexcept {
    return std::max((idw - kDimensionWitnessBound) / 4.0, 0.0);
}

/// Number of standard errors by which `value` exceeds `bound`, floored at 0.
inline double sigma_violation(double value, double std_err, double bound) {
    if (!(std_err > 0.0)) {
        throw DomainError("standard error must be positive, got " + std::to_string(std_err));
    }
    return std::max((value - bound) / std_err, 0.0);
}

/// Witness values of one table, with standard errors when they were estimated.
///
/// Determinant fields are empty when the table has fewer than four
/// preparations. Sigma fields are empty when no uncertainty is attached.
struct WitnessReport {
    std::optional<double> det_abs;
    double idw = 0.0;
    double r = 0.0;
    std::optional<double> sigma_det;
    std::optional<double> sigma_idw;

    struct Uncertainties {
        std::optional<double> det_abs;
        double idw = 0.0;
        double r = 0.0;
        friend bool operator==(const Uncertainties&, const Uncertainties&) = default;
    } uncertainties;

    friend bool operator==(const WitnessReport&, const WitnessReport&) = default;
};

/// Exact report for an analytic table (no uncertainties).
inline WitnessReport analyze(const ProbabilityTable& t) {
    WitnessReport rep;
    if (t.n_prep() >= 4 && t.n_meas() >= 2) {
        rep.det_abs = determinant_witness(t);
        rep.uncertainties.det_abs = 0.0;
    }
    rep.idw = dimension_witness(t);
    rep.r = retrocausality(rep.idw);
    return rep;
}

}  // namespace mwdce
