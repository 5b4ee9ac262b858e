// SPDX-License-Identifier: Apache-2.0

#include "nbasin/exhaustion.hpp"

#include <cmath>

namespace nbasin {

namespace {
constexpr double kTau = 6.28318530717958647692;
}

double find_invariant_disk_radius(const EntireFunction& fun, Complex root, double pixel_size,
                                  const OrbitConfig& cfg, int start_pixels, int boundary_samples) {
    EvalScratch scratch;
    double r = start_pixels * pixel_size;
    while (r >= 2.0 * pixel_size) {
        bool ok = true;
        for (int s = 0; s < boundary_samples && ok; ++s) {
            double a = kTau * s / boundary_samples;
            Complex p = root + Complex{r * std::cos(a), r * std::sin(a)};
            Jet2 j;
            try {
                j = fun.jet(p, scratch);
            } catch (const DivisionByZeroAt&) {
                ok = false;
                break;
            }
            if (!finite(j) || std::abs(j.d1) < cfg.pole_guard) {
                ok = false;
                break;
            }
            Complex image = p - j.f / j.d1;
            if (std::abs(image - root) > r - pixel_size) ok = false;
        }
        if (ok) return r;
        r *= 0.5;
    }
    throw NoInvariantDisk("no forward-invariant disk down to two pixels around (" +
                          std::to_string(root.real()) + ", " + std::to_string(root.imag()) + ")");
}

Exhaustion build_exhaustion(const EntireFunction& fun, Complex root, const GridSpec& spec,
                            int levels, const OrbitConfig& cfg) {
    if (levels < 0) throw std::invalid_argument("build_exhaustion: levels must be >= 0");
    int ri, rj;
    if (!spec.locate(root, ri, rj))
        throw RootOutsideGrid("exhaustion root lies outside the grid");

    Exhaustion out;
    out.root = root;
    out.s0_radius = find_invariant_disk_radius(fun, root, spec.pixel_width(), cfg);

    const int cols = spec.cols, rows = spec.rows;
    const size_t n = static_cast<size_t>(cols) * rows;

    Mask s0(cols, rows);
    for (int j = 0; j < rows; ++j)
        for (int i = 0; i < cols; ++i)
            if (std::abs(spec.pixel_center(i, j) - root) <= out.s0_radius) s0.set(i, j);
    out.levels.push_back({0, s0});
    if (levels == 0) return out;

    // One Newton image per pixel, reused by every level: the pullback test
    // for pixel p is "image pixel of N(p) lies in S_k".
    std::vector<int32_t> forward(n, -1);
    {
        EvalScratch scratch;
        for (int j = 0; j < rows; ++j) {
            for (int i = 0; i < cols; ++i) {
                Complex p = spec.pixel_center(i, j);
                Jet2 jet;
                try {
                    jet = fun.jet(p, scratch);
                } catch (const DivisionByZeroAt&) {
                    continue;
                }
                if (!finite(jet) || std::abs(jet.d1) < cfg.pole_guard) continue;
                Complex image = p - jet.f / jet.d1;
                int ii, jj;
                if (spec.locate(image, ii, jj))
                    forward[static_cast<size_t>(j) * cols + i] =
                        static_cast<int32_t>(static_cast<size_t>(jj) * cols + ii);
            }
        }
    }

    std::vector<size_t> stack;
    for (int k = 1; k <= levels; ++k) {
        const Mask& prev = out.levels.back().mask;
        Mask candidate = prev;
        for (size_t idx = 0; idx < n; ++idx)
            if (!candidate.bits[idx] && forward[idx] >= 0 &&
                prev.bits[static_cast<size_t>(forward[idx])])
                candidate.bits[idx] = 1;

        // Restrict to the 4-connected component containing S_0 (seeded from
        // the whole previous level, which is connected to S_0 by induction).
        Mask next(cols, rows);
        stack.clear();
        for (size_t idx = 0; idx < n; ++idx) {
            if (prev.bits[idx]) {
                next.bits[idx] = 1;
                stack.push_back(idx);
            }
        }
        while (!stack.empty()) {
            size_t idx = stack.back();
            stack.pop_back();
            int i = static_cast<int>(idx % cols);
            int j = static_cast<int>(idx / cols);
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                int ni = i + di[d], nj = j + dj[d];
                if (ni < 0 || nj < 0 || ni >= cols || nj >= rows) continue;
                size_t nidx = static_cast<size_t>(nj) * cols + ni;
                if (!candidate.bits[nidx] || next.bits[nidx]) continue;
                next.bits[nidx] = 1;
                stack.push_back(nidx);
            }
        }
        out.levels.push_back({k, std::move(next)});
    }
    return out;
}

double symmetric_difference_ratio(const Mask& a, const Mask& b) {
    int64_t delta = 0, base = 0;
    for (size_t idx = 0; idx < a.bits.size(); ++idx) {
        delta += (a.bits[idx] != b.bits[idx]) ? 1 : 0;
        base += b.bits[idx];
    }
    if (base == 0) return delta == 0 ? 0.0 : 1.0;
    return static_cast<double>(delta) / static_cast<double>(base);
}

} // namespace nbasin
