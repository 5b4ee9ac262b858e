// SPDX-License-Identifier: Apache-2.0
//
// Sampled verification of absorbing sets for escape dynamics: the region's
// sampled boundary must map strictly inside with a margin, and sampled
// escape-classified seeds must enter the region within the orbit budget.
// Regions are simply connected by construction (half-plane or sector).

#pragma once

#include <variant>

#include "nbasin/orbit.hpp"

namespace nbasin {

// { z : Re(e^{-i theta} z) < c }
struct HalfPlaneRegion {
    double theta = 0.0;
    double c = 0.0;
};

// { z : |z| > apex_radius, |arg z - direction| < half_aperture }
struct SectorRegion {
    double direction = 0.0;
    double half_aperture = 0.5;
    double apex_radius = 1.0;
};

using Region = std::variant<HalfPlaneRegion, SectorRegion>;

bool region_contains(const Region& region, Complex z);

// Signed distance-like margin: positive inside, negative outside.
double region_margin(const Region& region, Complex z);

struct AbsorbSample {
    Complex point{};
    double margin = 0.0; // boundary samples: margin of the image point
    int steps = -1;      // interior samples: steps until entry, -1 = never
    bool pass = false;
};

struct AbsorbReport {
    bool boundary_pass = false;
    double worst_margin = 0.0;
    bool interior_pass = false;
    int interior_entered = 0;
    int worst_entry_steps = 0;
    std::vector<AbsorbSample> boundary;
    std::vector<AbsorbSample> interior;
    bool pass() const { return boundary_pass && interior_pass; }
};

// boundary_span bounds the sampled stretch of the region boundary;
// seed box (center/width/height) is where interior escape seeds are drawn
// from a quasirandom sequence advanced by seed.
AbsorbReport verify_absorbing(const EntireFunction& fun, const Region& region,
                              int boundary_samples, int interior_samples, double boundary_span,
                              Complex seed_center, double seed_width, double seed_height,
                              double absorb_margin, const OrbitConfig& cfg, uint64_t seed = 0);

} // namespace nbasin
