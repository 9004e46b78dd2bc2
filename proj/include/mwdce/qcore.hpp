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

// One- and two-qubit pure states for polarization-encoded photons, the Born
// rule, and remote state preparation by heralding on half of an entangled pair.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "mwdce/error.hpp"

namespace mwdce {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kZeroBranchProbability = 1e-15;

/// Phase in radians, stored canonically in (-pi, pi].
class Phase {
   public:
    constexpr Phase() = default;
    explicit Phase(double radians) : value_(canonical(radians)) {
    }

    /// Phase given as a multiple of pi (config files carry phases this way).
    static Phase from_pi(double multiple) {
        return Phase(multiple * kPi);
    }

    double radians() const noexcept {
        return value_;
    }
    double in_pi() const noexcept {
        return value_ / kPi;
    }

    friend bool operator==(const Phase&, const Phase&) = default;

   private:
    static double canonical(double x) {
        if (!std::isfinite(x)) {
            throw DomainError("phase must be finite");
        }
        double v = std::remainder(x, 2.0 * kPi);  // [-pi, pi]
        if (v <= -kPi) {
            v += 2.0 * kPi;
        }
        return v;
    }

    double value_ = 0.0;
};

/// Single-qubit pure state a_H|H> + a_V|V>.
class Ket2 {
   public:
    /// Normalizes (h, v); throws DomainError for the zero vector.
    static Ket2 normalize(Complex h, Complex v) {
        double n = std::sqrt(std::norm(h) + std::norm(v));
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw DomainError("cannot normalize a zero or non-finite ket");
        }
        return Ket2(h / n, v / n);
    }

    static Ket2 horizontal() {
        return Ket2(1.0, 0.0);
    }
    static Ket2 vertical() {
        return Ket2(0.0, 1.0);
    }

    const Complex& h() const noexcept {
        return h_;
    }
    const Complex& v() const noexcept {
        return v_;
    }
    double norm2() const noexcept {
        return std::norm(h_) + std::norm(v_);
    }

   private:
    Ket2(Complex h, Complex v) : h_(h), v_(v) {
    }
    Complex h_;
    Complex v_;
};

/// Two-photon polarization state; first letter is Alice's photon.
class Ket4 {
   public:
    enum Index : std::size_t { HH = 0, HV = 1, VH = 2, VV = 3 };

    static Ket4 normalize(const std::array<Complex, 4>& amps) {
        double n = 0.0;
        for (const auto& a : amps) {
            n += std::norm(a);
        }
        n = std::sqrt(n);
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw DomainError("cannot normalize a zero or non-finite two-qubit ket");
        }
        std::array<Complex, 4> out{};
        for (std::size_t k = 0; k < 4; ++k) {
            out[k] = amps[k] / n;
        }
        return Ket4(out);
    }

    static Ket4 product(const Ket2& alice, const Ket2& bob) {
        return Ket4({alice.h() * bob.h(), alice.h() * bob.v(), alice.v() * bob.h(), alice.v() * bob.v()});
    }

    /// |HH> + |VV>
    static Ket4 phi_plus() {
        return normalize({1.0, 0.0, 0.0, 1.0});
    }
    /// |HV> + |VH>, what the source emits before the half-wave plate.
    static Ket4 psi_plus() {
        return normalize({0.0, 1.0, 1.0, 0.0});
    }

    const Complex& operator[](std::size_t k) const {
        return amps_[k];
    }
    double norm2() const noexcept {
        double n = 0.0;
        for (const auto& a : amps_) {
            n += std::norm(a);
        }
        return n;
    }

   private:
    explicit Ket4(const std::array<Complex, 4>& amps) : amps_(amps) {
    }
    std::array<Complex, 4> amps_;
};

/// (|H> + e^{i phi}|V>) / sqrt 2
inline Ket2 phase_ket(Phase phi) {
    return Ket2::normalize(1.0, std::polar(1.0, phi.radians()));
}

/// |<basis|state>|^2
inline double born(const Ket2& state, const Ket2& basis) {
    Complex overlap = std::conj(basis.h()) * state.h() + std::conj(basis.v()) * state.v();
    return std::norm(overlap);
}

/// Which diagonal port Alice's photon leaves the PBS by.
enum class HeraldSign { plus, minus };

struct HeraldResult {
    double probability;
    Ket2 bob;
};

/// Applies e^{i alice_phase} to Alice's V amplitude, projects Alice onto
/// (|H> +/- |V>)/sqrt 2, and returns the branch probability with Bob's
/// normalized conditional state.
inline HeraldResult herald(const Ket4& pair, Phase alice_phase, HeraldSign sign) {
    const Complex shift = std::polar(1.0, alice_phase.radians());
    const double s = sign == HeraldSign::plus ? 1.0 : -1.0;
    const double r = 1.0 / std::sqrt(2.0);
    Complex bob_h = r * (pair[Ket4::HH] + s * shift * pair[Ket4::VH]);
    Complex bob_v = r * (pair[Ket4::HV] + s * shift * pair[Ket4::VV]);
    double p = std::norm(bob_h) + std::norm(bob_v);
    if (p < kZeroBranchProbability) {
        throw ZeroProbabilityBranch("heralding branch has zero probability");
    }
    return {p, Ket2::normalize(bob_h, bob_v)};
}

/// Alice's EOM phase and herald outcome that steer Phi+ into phase_ket(alpha).
///
/// The EOM phase is taken in [0, pi); alpha outside that range is reached by
/// the minus outcome. For the four W settings this reproduces the EOM set
/// {0, pi/2}: 0 -> (0,+), pi -> (0,-), pi/2 -> (pi/2,+), -pi/2 -> (pi/2,-).
struct HeraldSetting {
    Phase alice_phase;
    HeraldSign sign;
};

inline HeraldSetting herald_setting(Phase alpha) {
    double a = alpha.radians();
    if (a >= 0.0 && a < kPi) {
        return {Phase(a), HeraldSign::plus};
    }
    return {Phase(a + kPi), HeraldSign::minus};
}

}  // namespace mwdce
