// SPDX-License-Identifier: Apache-2.0
//
// Second-order jets over the complex numbers.
//
// A Jet2 carries (f, f', f'') of an analytic function at a point and
// propagates exactly (to rounding) through arithmetic, exp, sin, cos and
// integer powers. Seeding with Jet2::variable(z) and pushing a value
// through a formula yields the formula's value and first two derivatives
// at z in a single pass.

#pragma once

#include <cmath>
#include <complex>

namespace nbasin {

using Complex = std::complex<double>;

// Componentwise complex multiply. Skips the runtime NaN-recovery of the
// library operator*, which dominates the profile in orbit loops; values
// in those loops are kept finite by the caller.
inline Complex cmul(Complex a, Complex b) {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
}

inline double abs2(Complex a) {
    return a.real() * a.real() + a.imag() * a.imag();
}

struct Jet2 {
    Complex f{};
    Complex d1{};
    Complex d2{};

    static Jet2 constant(Complex c) { return {c, {}, {}}; }
    static Jet2 variable(Complex z) { return {z, {1.0, 0.0}, {}}; }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.f + b.f, a.d1 + b.d1, a.d2 + b.d2};
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    return {a.f - b.f, a.d1 - b.d1, a.d2 - b.d2};
}

inline Jet2 operator-(const Jet2& a) { return {-a.f, -a.d1, -a.d2}; }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {cmul(a.f, b.f),
            cmul(a.d1, b.f) + cmul(a.f, b.d1),
            cmul(a.d2, b.f) + 2.0 * cmul(a.d1, b.d1) + cmul(a.f, b.d2)};
}

// h = a/b from a = h*b:  h' = (a' - h b')/b,  h'' = (a'' - 2 h' b' - h b'')/b.
inline Jet2 operator/(const Jet2& a, const Jet2& b) {
    Jet2 h;
    h.f = a.f / b.f;
    h.d1 = (a.d1 - cmul(h.f, b.d1)) / b.f;
    h.d2 = (a.d2 - 2.0 * cmul(h.d1, b.d1) - cmul(h.f, b.d2)) / b.f;
    return h;
}

inline Jet2 operator+(const Jet2& a, Complex c) { return {a.f + c, a.d1, a.d2}; }
inline Jet2 operator+(Complex c, const Jet2& a) { return a + c; }
inline Jet2 operator-(const Jet2& a, Complex c) { return {a.f - c, a.d1, a.d2}; }
inline Jet2 operator-(Complex c, const Jet2& a) { return {c - a.f, -a.d1, -a.d2}; }
inline Jet2 operator*(const Jet2& a, Complex c) {
    return {cmul(a.f, c), cmul(a.d1, c), cmul(a.d2, c)};
}
inline Jet2 operator*(Complex c, const Jet2& a) { return a * c; }
inline Jet2 operator/(const Jet2& a, Complex c) {
    return {a.f / c, a.d1 / c, a.d2 / c};
}
inline Jet2 operator/(Complex c, const Jet2& a) {
    return Jet2::constant(c) / a;
}

inline Jet2 exp(const Jet2& u) {
    Complex e = std::exp(u.f);
    return {e, cmul(e, u.d1), cmul(e, u.d2 + cmul(u.d1, u.d1))};
}

inline Jet2 sin(const Jet2& u) {
    Complex s = std::sin(u.f);
    Complex c = std::cos(u.f);
    return {s, cmul(c, u.d1), cmul(c, u.d2) - cmul(s, cmul(u.d1, u.d1))};
}

inline Jet2 cos(const Jet2& u) {
    Complex s = std::sin(u.f);
    Complex c = std::cos(u.f);
    return {c, -cmul(s, u.d1), -cmul(s, u.d2) - cmul(c, cmul(u.d1, u.d1))};
}

inline Complex cpow(Complex base, long k) {
    Complex r{1.0, 0.0};
    while (k > 0) {
        if (k & 1) r = cmul(r, base);
        base = cmul(base, base);
        k >>= 1;
    }
    return r;
}

// u^k for integer k >= 0.
inline Jet2 pow(const Jet2& u, long k) {
    if (k == 0) return Jet2::constant({1.0, 0.0});
    if (k == 1) return u;
    Complex pk2 = cpow(u.f, k - 2);
    Complex pk1 = cmul(pk2, u.f);
    Complex pk = cmul(pk1, u.f);
    double dk = static_cast<double>(k);
    return {pk,
            dk * cmul(pk1, u.d1),
            dk * (dk - 1.0) * cmul(pk2, cmul(u.d1, u.d1)) + dk * cmul(pk1, u.d2)};
}

inline bool finite(const Jet2& j) {
    return std::isfinite(j.f.real()) && std::isfinite(j.f.imag()) &&
           std::isfinite(j.d1.real()) && std::isfinite(j.d1.imag()) &&
           std::isfinite(j.d2.real()) && std::isfinite(j.d2.imag());
}

} // namespace nbasin
