// SPDX-License-Identifier: Apache-2.0
//
// Newton orbit iteration and terminal classification.
//
// A seed either converges to a root (registered and deduplicated), runs
// off to infinity with a coherent or incoherent direction, lands on a
// pole of the Newton map, or exhausts its budget (Indeterminate).
// Attracting cycles of period > 1, parabolic points and Siegel disks are
// out of scope and come back Indeterminate.

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "nbasin/function.hpp"

namespace nbasin {

struct OrbitConfig {
    int budget = 512;
    double pole_guard = 1e-12;
    double root_capture_radius = 1e-6;
    double root_merge_distance = 1e-4;
    double root_residual_tol = 1e-10;
    double escape_radius = 1e6;
    int direction_window = 16;
    double direction_epsilon = 0.2; // radians
    double step_tol = 1e-9;         // relative step size that flags convergence
    int polish_budget = 20;
};

enum class OrbitKind : uint8_t { Root, Escape, PoleHit, Indeterminate };

struct OrbitResult {
    OrbitKind kind = OrbitKind::Indeterminate;
    int root_id = -1;                    // valid for Root
    std::optional<double> direction;    // valid for Escape; empty = Rejected
    int iterations_used = 0;
    Complex final_point{};
    std::vector<Complex> trace;         // filled only when requested
};

struct RootEntry {
    int id = -1;
    Complex position{};
    double residual = 0.0; // |f(position)|
};

struct NotARoot : std::runtime_error {
    Complex candidate;
    explicit NotARoot(Complex c)
        : std::runtime_error("candidate does not polish to a root: (" +
                             std::to_string(c.real()) + ", " + std::to_string(c.imag()) + ")"),
          candidate(c) {}
};

class RootRegistry {
  public:
    const std::vector<RootEntry>& roots() const { return roots_; }
    bool empty() const { return roots_.empty(); }
    int size() const { return static_cast<int>(roots_.size()); }
    const RootEntry& entry(int id) const { return roots_.at(static_cast<size_t>(id)); }

    // Nearest entry within max_dist, or -1.
    int find(Complex p, double max_dist) const;

    // Appends a polished entry without dedup; caller guarantees spacing.
    int append(Complex position, double residual);

  private:
    std::vector<RootEntry> roots_;
};

// Polishes candidate with Newton steps and returns the existing id when it
// lands within root_merge_distance of a registry entry, otherwise appends.
// Throws NotARoot when polishing cannot reach residual tolerance.
int register_root(RootRegistry& registry, Complex candidate, const EntireFunction& fun,
                  const OrbitConfig& cfg);

// Registry-free classification of one seed; the workhorse behind both
// iterate_orbit and rasterization. `known` (optional) enables early capture
// against already-registered roots; self-detected roots are polished and
// returned in root_position. Deterministic: identical inputs give identical
// results regardless of threading.
struct OrbitCore {
    OrbitKind kind = OrbitKind::Indeterminate;
    Complex root_position{};          // polished, valid for Root
    int captured_id = -1;             // >= 0 when an entry of `known` captured the orbit
    std::optional<double> direction;  // valid for Escape
    int iterations = 0;
    Complex final_point{};
};

OrbitCore classify_orbit(const EntireFunction& fun, Complex z0, const OrbitConfig& cfg,
                         EvalScratch& scratch, const RootRegistry* known = nullptr,
                         std::vector<Complex>* trace = nullptr);

// Single-seed API: classifies and registers newly discovered roots.
OrbitResult iterate_orbit(const EntireFunction& fun, Complex z0, int budget,
                          RootRegistry& registry, const OrbitConfig& cfg,
                          bool want_trace = false);

// Circular mean of the last direction_window arguments when their circular
// standard deviation is below direction_epsilon; empty (Rejected) otherwise.
// Precondition: tail has at least direction_window points with moduli above
// escape_radius.
std::optional<double> classify_escape_direction(const std::vector<Complex>& tail,
                                                const OrbitConfig& cfg);

// Deterministic merge of converged-orbit limits into a canonical registry:
// sort by position, greedy dedup at root_merge_distance, ids in sorted
// order.
RootRegistry canonicalize_roots(std::vector<Complex> candidates, const EntireFunction& fun,
                                const OrbitConfig& cfg);

} // namespace nbasin
