// SPDX-License-Identifier: Apache-2.0
//
// Pullback exhaustion of an immediate basin on a raster.
//
// S_0 is a forward-invariant disk around the root (found by halving a
// starting radius until sampled boundary points map strictly inside;
// |N - root| is the modulus of a holomorphic function, so its maximum over
// the closed disk is attained on the boundary). S_{k+1} adds the pixels
// whose Newton image lands in S_k, restricted to the 4-connected component
// containing S_0, and unions S_k so nesting is exact by construction.

#pragma once

#include "nbasin/grid.hpp"

namespace nbasin {

struct NoInvariantDisk : std::runtime_error {
    explicit NoInvariantDisk(const std::string& what) : std::runtime_error(what) {}
};

struct ExhaustionLevel {
    int k = 0;
    Mask mask;
};

struct Exhaustion {
    Complex root{};
    double s0_radius = 0.0;
    std::vector<ExhaustionLevel> levels; // levels[k] is S_k, k = 0..K
};

// Largest forward-invariant pixel disk radius around root: starts at
// start_pixels * pixel width, tests boundary_samples points for strict
// invariance with a one-pixel margin, halves on failure down to two
// pixels. Throws NoInvariantDisk when no radius qualifies.
double find_invariant_disk_radius(const EntireFunction& fun, Complex root, double pixel_size,
                                  const OrbitConfig& cfg, int start_pixels = 8,
                                  int boundary_samples = 64);

Exhaustion build_exhaustion(const EntireFunction& fun, Complex root, const GridSpec& spec,
                            int levels, const OrbitConfig& cfg);

// |a triangle b| / |b| with the convention 0/0 = 0.
double symmetric_difference_ratio(const Mask& a, const Mask& b);

} // namespace nbasin
