// SPDX-License-Identifier: Apache-2.0
//
// Entire functions and their Newton maps.
//
// N(z) = z - f(z)/f'(z). The finite fixed points of N are exactly the
// roots of f, and they are attracting; N'(z) = f(z) f''(z) / f'(z)^2, so
// critical points of N away from poles are the zeros of f·f''.

#pragma once

#include <stdexcept>
#include <string>

#include "nbasin/expr.hpp"

namespace nbasin {

struct EntireFunction {
    ExprPtr tree;
    std::string display_name;

    Jet2 jet(Complex z, EvalScratch& scratch) const { return eval_jet(*tree, z, scratch); }
    Jet2 jet(Complex z) const { return eval_jet(*tree, z); }
};

EntireFunction make_function(const std::string& text);

// f(z) = z * exp(-z^n / n), n >= 1. Its Newton map has the closed form
// below; the two routes agree to rounding and are cross-checked in tests.
EntireFunction make_family_exp_zn(int n);

struct DerivativeZero : std::runtime_error {
    Complex at;
    explicit DerivativeZero(Complex z)
        : std::runtime_error("f' vanishes at z = (" + std::to_string(z.real()) + ", " +
                             std::to_string(z.imag()) + "); Newton map has a pole"),
          at(z) {}
};

struct NearPole : std::runtime_error {
    Complex at;
    explicit NearPole(Complex z)
        : std::runtime_error("|f'| below pole guard at z = (" + std::to_string(z.real()) +
                             ", " + std::to_string(z.imag()) + ")"),
          at(z) {}
};

struct PoleOfMap : std::runtime_error {
    Complex at;
    explicit PoleOfMap(Complex z)
        : std::runtime_error("z^n = 1: pole of the family Newton map at z = (" +
                             std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")"),
          at(z) {}
};

inline constexpr double kDefaultPoleGuard = 1e-12;

// z - f/f'. Throws DerivativeZero when f'(z) == 0 and NearPole when
// |f'(z)| < pole_guard while |f(z)| > pole_guard.
Complex newton_step(const EntireFunction& fun, Complex z, double pole_guard = kDefaultPoleGuard);

// N'(z) = f f'' / f'^2; zero exactly at the critical points of N.
Complex newton_derivative(const EntireFunction& fun, Complex z,
                          double pole_guard = kDefaultPoleGuard);

// Step and derivative from an already-evaluated jet (hot paths).
inline Complex newton_step_from_jet(const Jet2& j, Complex z) { return z - j.f / j.d1; }
inline Complex newton_derivative_from_jet(const Jet2& j) {
    return cmul(j.f, j.d2) / cmul(j.d1, j.d1);
}

// -z^(n+1) / (1 - z^n), the Newton map of the exp_zn family. Throws
// PoleOfMap when z^n == 1.
Complex family_newton_closed_form(int n, Complex z);

} // namespace nbasin
