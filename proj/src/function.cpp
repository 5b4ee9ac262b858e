// SPDX-License-Identifier: Apache-2.0

#include "nbasin/function.hpp"

namespace nbasin {

EntireFunction make_function(const std::string& text) {
    return {parse_expression(text), text};
}

EntireFunction make_family_exp_zn(int n) {
    if (n < 1) throw std::invalid_argument("exp_zn family: n must be >= 1");
    std::string name = "z*exp(-z^" + std::to_string(n) + "/" + std::to_string(n) + ")";
    // Built once as a tree so jet evaluation, orbits and rasters all use
    // the same path as user-typed functions.
    ExprBuilder b;
    int32_t z = b.variable();
    int32_t zn = b.pow(z, n);
    int32_t scaled = b.div(zn, b.constant({static_cast<double>(n), 0.0}));
    int32_t inner = b.neg(scaled);
    int32_t e = b.fn(NodeKind::Exp, inner);
    int32_t root = b.mul(z, e);
    (void)root;
    return {b.finish(name), name};
}

Complex newton_step(const EntireFunction& fun, Complex z, double pole_guard) {
    Jet2 j = fun.jet(z);
    double d1 = std::abs(j.d1);
    if (d1 == 0.0) throw DerivativeZero(z);
    if (d1 < pole_guard && std::abs(j.f) > pole_guard) throw NearPole(z);
    return z - j.f / j.d1;
}

Complex newton_derivative(const EntireFunction& fun, Complex z, double pole_guard) {
    Jet2 j = fun.jet(z);
    double d1 = std::abs(j.d1);
    if (d1 == 0.0) throw DerivativeZero(z);
    if (d1 < pole_guard && std::abs(j.f) > pole_guard) throw NearPole(z);
    return cmul(j.f, j.d2) / cmul(j.d1, j.d1);
}

Complex family_newton_closed_form(int n, Complex z) {
    Complex zn = cpow(z, n);
    Complex den = Complex{1.0, 0.0} - zn;
    if (den.real() == 0.0 && den.imag() == 0.0) throw PoleOfMap(z);
    return -cmul(zn, z) / den;
}

} // namespace nbasin
