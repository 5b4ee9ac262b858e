// SPDX-License-Identifier: Apache-2.0
//
// Rasterized basins: per-pixel orbit classification over a rectangle,
// connected components, hole detection and the unboundedness check.
//
// Digital topology convention: masks (foreground) use 4-connectivity,
// complements (background) use 8-connectivity. This is the standard dual
// pairing that keeps raster hole counts consistent with plane topology.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nbasin/orbit.hpp"

namespace nbasin {

struct GridSpec {
    Complex center{};
    double width = 4.0;
    double height = 4.0;
    int cols = 256;
    int rows = 256;

    // Pixel (i, j) with i in [0, cols) and j in [0, rows); j = 0 is the
    // bottom row. Sample points are pixel centers.
    Complex pixel_center(int i, int j) const {
        double x0 = center.real() - 0.5 * width;
        double y0 = center.imag() - 0.5 * height;
        return {x0 + (i + 0.5) * width / cols, y0 + (j + 0.5) * height / rows};
    }
    double pixel_width() const { return width / cols; }
    double pixel_height() const { return height / rows; }
    bool valid() const { return cols >= 2 && rows >= 2 && width > 0.0 && height > 0.0; }

    // Containing pixel (== nearest pixel center); false when p is outside.
    bool locate(Complex p, int& i, int& j) const {
        double x0 = center.real() - 0.5 * width;
        double y0 = center.imag() - 0.5 * height;
        double fx = (p.real() - x0) / pixel_width();
        double fy = (p.imag() - y0) / pixel_height();
        if (!(fx >= 0.0) || !(fy >= 0.0) || fx >= cols || fy >= rows) return false;
        i = static_cast<int>(fx);
        j = static_cast<int>(fy);
        return true;
    }
};

enum class LabelKind : uint8_t {
    Root = 0,
    EscapeCluster = 1,
    EscapeRejected = 2,
    Pole = 3,
    Indeterminate = 4,
};

inline int32_t make_label(LabelKind kind, int index = 0) {
    return (static_cast<int32_t>(kind) << 24) | index;
}
inline LabelKind label_kind(int32_t label) { return static_cast<LabelKind>(label >> 24); }
inline int label_index(int32_t label) { return label & 0xFFFFFF; }

struct EscapeCluster {
    double direction = 0.0; // circular mean of member directions
    int64_t weight = 0;     // member pixel count
};

struct Mask {
    int cols = 0;
    int rows = 0;
    std::vector<uint8_t> bits;

    Mask() = default;
    Mask(int c, int r) : cols(c), rows(r), bits(static_cast<size_t>(c) * r, 0) {}
    bool at(int i, int j) const { return bits[static_cast<size_t>(j) * cols + i] != 0; }
    void set(int i, int j, bool v = true) {
        bits[static_cast<size_t>(j) * cols + i] = v ? 1 : 0;
    }
    int64_t count() const;
    bool touches_boundary() const;
};

struct BasinGrid {
    GridSpec spec;
    RootRegistry roots;
    std::vector<EscapeCluster> clusters;
    std::vector<int32_t> labels;     // row-major, j * cols + i
    std::vector<int32_t> components; // dense component ids, same indexing
    std::vector<uint16_t> iterations;

    size_t index(int i, int j) const { return static_cast<size_t>(j) * spec.cols + i; }
    int32_t label_at(int i, int j) const { return labels[index(i, j)]; }
    int64_t count_kind(LabelKind kind) const;
};

// Classifies every pixel center, merges discovered roots deterministically
// (tile-order concat, sort by position, dedup at root_merge_distance),
// clusters escape directions, labels and components. Output is
// bit-identical for any worker count. workers <= 0 selects hardware
// concurrency.
BasinGrid rasterize(const EntireFunction& fun, const GridSpec& spec, const OrbitConfig& cfg,
                    int workers = 0);

struct RootOutsideGrid : std::runtime_error {
    explicit RootOutsideGrid(const std::string& what) : std::runtime_error(what) {}
};

// 4-connected component of root_id's label containing the pixel nearest
// the root. Throws RootOutsideGrid when the id is unknown or the root
// position lies outside the grid.
Mask immediate_basin(const BasinGrid& grid, int root_id);

struct HoleComponent {
    std::vector<size_t> pixels;
    int min_i = 0, min_j = 0, max_i = 0, max_j = 0;
    bool contains_classified = false;
};

// 8-connected components of the complement of mask that do not touch the
// grid boundary. When dont_care is given (indeterminate pixels, typically),
// components consisting solely of dont_care pixels are dropped: budget-
// limited pixels must not fabricate holes.
std::vector<HoleComponent> detect_holes(const Mask& mask, const Mask* dont_care = nullptr);

// True when a hole found at base resolution survives at double resolution:
// some fine hole overlaps the hole's scaled footprint.
bool hole_confirmed_at_2x(const HoleComponent& hole, int base_cols,
                          const std::vector<HoleComponent>& fine_holes, int fine_cols);

struct UnboundedRound {
    GridSpec spec;
    bool touches = false;
    int64_t mask_pixels = 0;
};

struct UnboundedReport {
    int root_id = -1;
    Complex root{};
    std::vector<UnboundedRound> rounds;
    bool pass = false;
};

// Doubles the grid extent each round and asserts the immediate basin mask
// still touches the grid boundary. scale_resolution grows cols/rows with
// the extent (clamped to max_cols) so pixel size stays constant; otherwise
// resolution is fixed and pixels grow.
UnboundedReport check_unbounded(const EntireFunction& fun, Complex root, const GridSpec& spec,
                                double growth_factor, int rounds, const OrbitConfig& cfg,
                                int workers = 0, bool scale_resolution = false,
                                int max_cols = 4096);

} // namespace nbasin
