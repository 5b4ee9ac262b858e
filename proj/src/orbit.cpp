// SPDX-License-Identifier: Apache-2.0

#include "nbasin/orbit.hpp"

#include <algorithm>
#include <cmath>

namespace nbasin {

namespace {

// Newton-polish toward a nearby root until both |f| and the step are below
// root_residual_tol relative to the local scale. Returns the polished point
// or nothing.
std::optional<Complex> polish_root(const EntireFunction& fun, Complex z, const OrbitConfig& cfg,
                                   EvalScratch& scratch) {
    for (int k = 0; k < cfg.polish_budget; ++k) {
        Jet2 j;
        try {
            j = fun.jet(z, scratch);
        } catch (const DivisionByZeroAt&) {
            return std::nullopt;
        }
        if (!finite(j) || std::abs(j.d1) < cfg.pole_guard) return std::nullopt;
        Complex step = j.f / j.d1;
        double scale = 1.0 + std::abs(z);
        if (std::abs(j.f) <= cfg.root_residual_tol * scale &&
            std::abs(step) <= cfg.root_residual_tol * scale)
            return z;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
    }
    return std::nullopt;
}

struct CircStats {
    double mean;
    double stddev;
};

CircStats circular_stats(const Complex* pts, int n) {
    double cx = 0.0, cy = 0.0;
    for (int i = 0; i < n; ++i) {
        double a = std::arg(pts[i]);
        cx += std::cos(a);
        cy += std::sin(a);
    }
    cx /= n;
    cy /= n;
    double r = std::sqrt(cx * cx + cy * cy);
    double mean = std::atan2(cy, cx);
    if (mean < 0.0) mean += 2.0 * 3.14159265358979323846;
    double sd = (r >= 1.0) ? 0.0 : std::sqrt(std::max(0.0, -2.0 * std::log(std::max(r, 1e-300))));
    return {mean, sd};
}

} // namespace

int RootRegistry::find(Complex p, double max_dist) const {
    int best = -1;
    double best_d = max_dist;
    for (const RootEntry& e : roots_) {
        double d = std::abs(p - e.position);
        if (d <= best_d) {
            best_d = d;
            best = e.id;
        }
    }
    return best;
}

int RootRegistry::append(Complex position, double residual) {
    int id = static_cast<int>(roots_.size());
    roots_.push_back({id, position, residual});
    return id;
}

int register_root(RootRegistry& registry, Complex candidate, const EntireFunction& fun,
                  const OrbitConfig& cfg) {
    int existing = registry.find(candidate, cfg.root_merge_distance);
    if (existing >= 0) return existing;
    EvalScratch scratch;
    std::optional<Complex> polished = polish_root(fun, candidate, cfg, scratch);
    if (!polished) throw NotARoot(candidate);
    existing = registry.find(*polished, cfg.root_merge_distance);
    if (existing >= 0) return existing;
    return registry.append(*polished, std::abs(fun.jet(*polished, scratch).f));
}

OrbitCore classify_orbit(const EntireFunction& fun, Complex z0, const OrbitConfig& cfg,
                         EvalScratch& scratch, const RootRegistry* known,
                         std::vector<Complex>* trace) {
    OrbitCore out;
    Complex z = z0;
    const int W = cfg.direction_window;
    std::vector<Complex> ring(static_cast<size_t>(W));
    int ring_count = 0;
    int ring_head = 0;
    int small_steps = 0;
    const double er2 = cfg.escape_radius * cfg.escape_radius;

    if (trace) {
        trace->clear();
        trace->push_back(z);
    }

    for (int it = 0; it < cfg.budget; ++it) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            out.kind = OrbitKind::Indeterminate;
            out.iterations = it;
            out.final_point = z;
            return out;
        }

        // Escape test on the current point: a full window of iterates,
        // all beyond escape_radius, with strictly increasing moduli.
        if (abs2(z) > er2 && ring_count == W) {
            bool ok = true;
            double prev = -1.0;
            for (int i = 0; i < W && ok; ++i) {
                const Complex& p = ring[static_cast<size_t>((ring_head + i) % W)];
                double m = std::abs(p);
                if (m * m <= er2 || m <= prev) ok = false;
                prev = m;
            }
            if (ok) {
                std::vector<Complex> window(static_cast<size_t>(W));
                for (int i = 0; i < W; ++i)
                    window[static_cast<size_t>(i)] = ring[static_cast<size_t>((ring_head + i) % W)];
                out.kind = OrbitKind::Escape;
                out.direction = classify_escape_direction(window, cfg);
                out.iterations = it;
                out.final_point = z;
                return out;
            }
        }

        if (known) {
            int id = known->find(z, cfg.root_capture_radius);
            if (id >= 0) {
                // Confirm attraction before capturing.
                Complex xi = known->entry(id).position;
                Jet2 j;
                bool fine = true;
                try {
                    j = fun.jet(z, scratch);
                } catch (const DivisionByZeroAt&) {
                    fine = false;
                }
                if (fine && finite(j) && std::abs(j.d1) > 0.0) {
                    Complex next = z - j.f / j.d1;
                    if (std::abs(next - xi) < std::abs(z - xi) || z == xi) {
                        out.kind = OrbitKind::Root;
                        out.root_position = xi;
                        out.captured_id = id;
                        out.iterations = it;
                        out.final_point = z;
                        return out;
                    }
                }
            }
        }

        Jet2 j;
        try {
            j = fun.jet(z, scratch);
        } catch (const DivisionByZeroAt&) {
            out.kind = OrbitKind::Indeterminate;
            out.iterations = it;
            out.final_point = z;
            return out;
        }
        if (!finite(j)) {
            out.kind = OrbitKind::Indeterminate;
            out.iterations = it;
            out.final_point = z;
            return out;
        }

        double ad1 = std::abs(j.d1);
        if (ad1 < cfg.pole_guard) {
            if (std::abs(j.f) > cfg.pole_guard) {
                out.kind = OrbitKind::PoleHit;
                out.iterations = it;
                out.final_point = z;
                return out;
            }
            // f and f' both below guard: degenerate; give up on this seed.
            out.kind = OrbitKind::Indeterminate;
            out.iterations = it;
            out.final_point = z;
            return out;
        }

        Complex step = j.f / j.d1;
        if (std::abs(step) <= cfg.step_tol * (1.0 + std::abs(z))) {
            if (++small_steps >= 2) {
                std::optional<Complex> polished = polish_root(fun, z, cfg, scratch);
                if (polished) {
                    out.kind = OrbitKind::Root;
                    out.root_position = *polished;
                    out.iterations = it;
                    out.final_point = z;
                    return out;
                }
                small_steps = 0;
            }
        } else {
            small_steps = 0;
        }

        z -= step;
        ring[static_cast<size_t>(ring_head)] = z;
        ring_head = (ring_head + 1) % W;
        if (ring_count < W) ++ring_count;
        if (trace) trace->push_back(z);
    }

    out.kind = OrbitKind::Indeterminate;
    out.iterations = cfg.budget;
    out.final_point = z;
    return out;
}

OrbitResult iterate_orbit(const EntireFunction& fun, Complex z0, int budget,
                          RootRegistry& registry, const OrbitConfig& cfg, bool want_trace) {
    if (budget < 1) throw std::invalid_argument("iterate_orbit: budget must be >= 1");
    OrbitConfig local = cfg;
    local.budget = budget;
    EvalScratch scratch;
    OrbitResult res;
    OrbitCore core = classify_orbit(fun, z0, local, scratch, &registry,
                                    want_trace ? &res.trace : nullptr);
    res.kind = core.kind;
    res.direction = core.direction;
    res.iterations_used = core.iterations;
    res.final_point = core.final_point;
    if (core.kind == OrbitKind::Root) {
        res.root_id = core.captured_id >= 0
                          ? core.captured_id
                          : register_root(registry, core.root_position, fun, cfg);
    }
    return res;
}

std::optional<double> classify_escape_direction(const std::vector<Complex>& tail,
                                                const OrbitConfig& cfg) {
    const int W = cfg.direction_window;
    if (static_cast<int>(tail.size()) < W)
        throw std::invalid_argument("classify_escape_direction: tail shorter than window");
    const Complex* last = tail.data() + (tail.size() - static_cast<size_t>(W));
    CircStats st = circular_stats(last, W);
    if (st.stddev < cfg.direction_epsilon) return st.mean;
    return std::nullopt;
}

RootRegistry canonicalize_roots(std::vector<Complex> candidates, const EntireFunction& fun,
                                const OrbitConfig& cfg) {
    std::sort(candidates.begin(), candidates.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    RootRegistry reg;
    EvalScratch scratch;
    for (Complex c : candidates) {
        if (reg.find(c, cfg.root_merge_distance) >= 0) continue;
        reg.append(c, std::abs(fun.jet(c, scratch).f));
    }
    return reg;
}

} // namespace nbasin
