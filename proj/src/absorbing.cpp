// SPDX-License-Identifier: Apache-2.0

#include "nbasin/absorbing.hpp"

#include <cmath>

namespace nbasin {

namespace {

constexpr double kTau = 6.28318530717958647692;

double wrap_angle_diff(double a, double b) {
    double d = std::fmod(a - b, kTau);
    if (d > kTau / 2) d -= kTau;
    if (d < -kTau / 2) d += kTau;
    return d;
}

// Low-discrepancy points in the unit square (R2 additive recurrence).
struct R2Seq {
    uint64_t k;
    explicit R2Seq(uint64_t start) : k(start) {}
    void next(double& x, double& y) {
        ++k;
        double a = 0.7548776662466927 * static_cast<double>(k);
        double b = 0.5698402909980532 * static_cast<double>(k);
        x = a - std::floor(a);
        y = b - std::floor(b);
    }
};

} // namespace

bool region_contains(const Region& region, Complex z) {
    return region_margin(region, z) > 0.0;
}

double region_margin(const Region& region, Complex z) {
    if (const auto* hp = std::get_if<HalfPlaneRegion>(&region)) {
        Complex rotated = z * Complex{std::cos(-hp->theta), std::sin(-hp->theta)};
        return hp->c - rotated.real();
    }
    const auto& s = std::get<SectorRegion>(region);
    double r = std::abs(z);
    double d = wrap_angle_diff(std::arg(z), s.direction);
    double radial = r - s.apex_radius;
    double angular = r * std::sin(s.half_aperture - std::abs(d));
    return std::min(radial, angular);
}

AbsorbReport verify_absorbing(const EntireFunction& fun, const Region& region,
                              int boundary_samples, int interior_samples, double boundary_span,
                              Complex seed_center, double seed_width, double seed_height,
                              double absorb_margin, const OrbitConfig& cfg, uint64_t seed) {
    AbsorbReport report;
    EvalScratch scratch;

    // Boundary points of the region.
    std::vector<Complex> boundary;
    if (const auto* hp = std::get_if<HalfPlaneRegion>(&region)) {
        Complex e{std::cos(hp->theta), std::sin(hp->theta)};
        for (int k = 0; k < boundary_samples; ++k) {
            double s = -boundary_span + 2.0 * boundary_span * k / (boundary_samples - 1);
            boundary.push_back(e * Complex{hp->c, s});
        }
    } else {
        const auto& sec = std::get<SectorRegion>(region);
        int per_piece = std::max(1, boundary_samples / 3);
        for (int k = 0; k < per_piece; ++k) {
            double r = sec.apex_radius +
                       (boundary_span - sec.apex_radius) * (k + 0.5) / per_piece;
            double lo = sec.direction - sec.half_aperture;
            double hi = sec.direction + sec.half_aperture;
            boundary.push_back(Complex{r * std::cos(lo), r * std::sin(lo)});
            boundary.push_back(Complex{r * std::cos(hi), r * std::sin(hi)});
        }
        for (int k = 0; k < per_piece; ++k) {
            double a = sec.direction - sec.half_aperture +
                       2.0 * sec.half_aperture * (k + 0.5) / per_piece;
            boundary.push_back(sec.apex_radius * Complex{std::cos(a), std::sin(a)});
        }
    }

    report.boundary_pass = true;
    report.worst_margin = std::numeric_limits<double>::infinity();
    for (Complex p : boundary) {
        AbsorbSample sample;
        sample.point = p;
        double margin = -std::numeric_limits<double>::infinity();
        try {
            Jet2 j = fun.jet(p, scratch);
            if (finite(j) && std::abs(j.d1) >= cfg.pole_guard)
                margin = region_margin(region, p - j.f / j.d1);
        } catch (const DivisionByZeroAt&) {
        }
        sample.margin = margin;
        sample.pass = margin >= absorb_margin;
        report.boundary_pass = report.boundary_pass && sample.pass;
        report.worst_margin = std::min(report.worst_margin, margin);
        report.boundary.push_back(sample);
    }

    // Escape-classified seeds must enter the region within budget.
    R2Seq qr(seed);
    report.interior_pass = true;
    int found = 0;
    int attempts = 0;
    const int max_attempts = interior_samples * 64;
    while (found < interior_samples && attempts < max_attempts) {
        ++attempts;
        double x, y;
        qr.next(x, y);
        Complex z0 = seed_center + Complex{(x - 0.5) * seed_width, (y - 0.5) * seed_height};
        OrbitCore core = classify_orbit(fun, z0, cfg, scratch);
        if (core.kind != OrbitKind::Escape) continue;
        ++found;
        AbsorbSample sample;
        sample.point = z0;
        Complex z = z0;
        for (int step = 0; step <= cfg.budget; ++step) {
            if (region_contains(region, z)) {
                sample.steps = step;
                break;
            }
            Jet2 j;
            try {
                j = fun.jet(z, scratch);
            } catch (const DivisionByZeroAt&) {
                break;
            }
            if (!finite(j) || std::abs(j.d1) < cfg.pole_guard) break;
            z -= j.f / j.d1;
        }
        sample.pass = sample.steps >= 0;
        if (sample.pass) {
            ++report.interior_entered;
            report.worst_entry_steps = std::max(report.worst_entry_steps, sample.steps);
        }
        report.interior_pass = report.interior_pass && sample.pass;
        report.interior.push_back(sample);
    }
    if (found < interior_samples) report.interior_pass = false;
    return report;
}

} // namespace nbasin
