// SPDX-License-Identifier: Apache-2.0
//
// Accesses to infinity and escape petals on a large circle.
//
// An access is operationalized as a maximal arc of circle samples whose
// orbits land in the given root's immediate basin, with membership
// confirmed by a radial segment walked through the basin raster. On the
// same circle, escape arcs grouped by direction cluster alternate with the
// basin arcs when the channels separate the virtual basins.

#pragma once

#include "nbasin/grid.hpp"

namespace nbasin {

struct ChannelArc {
    double start_angle = 0.0; // radians in [0, tau)
    double end_angle = 0.0;   // >= start_angle; may exceed tau for a wrapped arc
};

struct ChannelReport {
    int root_id = -1;
    double radius = 0.0;
    int samples_per_circle = 0;
    std::vector<ChannelArc> arcs;
    int arc_count() const { return static_cast<int>(arcs.size()); }
};

struct RadiusTooSmall : std::runtime_error {
    explicit RadiusTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct NoEscapePixels : std::runtime_error {
    NoEscapePixels() : std::runtime_error("grid contains no escape-classified pixels") {}
};

struct CountMismatch : std::runtime_error {
    explicit CountMismatch(const std::string& what) : std::runtime_error(what) {}
};

// Classifies samples_per_circle points on |z| = radius, marks those in
// root_id's immediate basin (orbit lands at the root and the radial
// segment into the raster stays in the root's label), and groups maximal
// arcs. Throws RadiusTooSmall when the circle does not exit the root's
// invariant disk.
ChannelReport count_channels(const EntireFunction& fun, const BasinGrid& grid, int root_id,
                             double radius, int samples_per_circle, const OrbitConfig& cfg);

struct PetalReport {
    std::vector<double> cluster_directions;
    std::vector<int64_t> cluster_weights;
    int cluster_count() const { return static_cast<int>(cluster_directions.size()); }
};

// Escape-direction clusters of the raster (single-linkage on the circle
// with gap threshold direction_epsilon). Throws NoEscapePixels.
PetalReport cluster_escape_directions(const BasinGrid& grid);

// |1/N(1/zeta) - (zeta - zeta^{n+1})| for the exp_zn family Newton map.
double conjugation_residual(int n, Complex zeta);

enum class CircleSymbol : uint8_t { None = 0, Channel = 1, Petal = 2 };

struct SeparationEntry {
    CircleSymbol type = CircleSymbol::None;
    int id = -1;
};

struct SeparationReport {
    bool pass = false;
    int expected_n = 0;
    std::vector<SeparationEntry> sequence; // cyclic arc sequence, gaps dropped
};

// Cyclic run compression of per-sample symbols with gap removal; adjacent
// runs of the same symbol merge across gaps.
std::vector<SeparationEntry> compress_circle_symbols(const std::vector<SeparationEntry>& symbols);

// True when the sequence has length 2n and strictly alternates
// channel/petal.
bool alternates(const std::vector<SeparationEntry>& sequence, int n);

// Verifies that basin arcs and escape-cluster arcs alternate on the
// sampling circle of the channel report. Throws CountMismatch when arc and
// cluster counts differ.
SeparationReport separation_check(const EntireFunction& fun, const BasinGrid& grid,
                                  const ChannelReport& channels, const PetalReport& petals,
                                  const OrbitConfig& cfg);

} // namespace nbasin
