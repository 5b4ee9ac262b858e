// SPDX-License-Identifier: Apache-2.0

#include "nbasin/grid.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <thread>

namespace nbasin {

namespace {

constexpr double kTau = 6.28318530717958647692;
constexpr uint16_t kNoDirection = 0xFFFF;
constexpr int kDirBins = 0xFFFF; // quantization of [0, tau)

uint16_t quantize_direction(double a) {
    double t = a / kTau;
    t -= std::floor(t);
    int q = static_cast<int>(t * kDirBins);
    if (q >= kDirBins) q = kDirBins - 1;
    return static_cast<uint16_t>(q);
}

double bin_center(int q) { return (q + 0.5) * kTau / kDirBins; }

struct UnionFind {
    std::vector<int32_t> parent;
    explicit UnionFind(size_t n) : parent(n) {
        for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int32_t>(i);
    }
    int32_t find(int32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int32_t a, int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b)
            parent[b] = a;
        else
            parent[a] = b;
    }
};

// Single-linkage clustering on the circle via a direction histogram: bins
// separated by an empty gap wider than direction_epsilon split clusters;
// a narrow wrap gap merges the first and last run.
std::vector<EscapeCluster> cluster_histogram(const std::vector<int64_t>& hist, double eps) {
    const int gap_bins = std::max(1, static_cast<int>(eps / (kTau / kDirBins)));
    std::vector<std::pair<int, int>> runs; // [first, last] occupied bin ranges
    int run_start = -1;
    int last_occupied = -1;
    for (int q = 0; q < kDirBins; ++q) {
        if (hist[q] == 0) continue;
        if (run_start < 0) {
            run_start = q;
        } else if (q - last_occupied > gap_bins) {
            runs.push_back({run_start, last_occupied});
            run_start = q;
        }
        last_occupied = q;
    }
    if (run_start >= 0) runs.push_back({run_start, last_occupied});
    if (runs.empty()) return {};
    if (runs.size() > 1) {
        int wrap_gap = (runs.front().first + kDirBins) - runs.back().second;
        if (wrap_gap <= gap_bins) {
            runs.back().second = runs.front().second + kDirBins; // wrapped run
            runs.erase(runs.begin());
        }
    }
    std::vector<EscapeCluster> clusters;
    for (auto [a, b] : runs) {
        double cx = 0.0, cy = 0.0;
        int64_t w = 0;
        for (int q = a; q <= b; ++q) {
            int qq = q % kDirBins;
            if (hist[qq] == 0) continue;
            double ang = bin_center(qq);
            cx += hist[qq] * std::cos(ang);
            cy += hist[qq] * std::sin(ang);
            w += hist[qq];
        }
        double dir = std::atan2(cy, cx);
        if (dir < 0.0) dir += kTau;
        clusters.push_back({dir, w});
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const EscapeCluster& a, const EscapeCluster& b) {
                  return a.direction < b.direction;
              });
    return clusters;
}

int assign_cluster(uint16_t q, const std::vector<std::pair<int, int>>& ranges) {
    for (size_t c = 0; c < ranges.size(); ++c) {
        auto [a, b] = ranges[c];
        int qq = q;
        if (qq < a) qq += kDirBins;
        if (qq >= a && qq <= b) return static_cast<int>(c);
    }
    return -1;
}

} // namespace

int64_t Mask::count() const {
    int64_t n = 0;
    for (uint8_t b : bits) n += b;
    return n;
}

bool Mask::touches_boundary() const {
    for (int i = 0; i < cols; ++i)
        if (at(i, 0) || at(i, rows - 1)) return true;
    for (int j = 0; j < rows; ++j)
        if (at(0, j) || at(cols - 1, j)) return true;
    return false;
}

int64_t BasinGrid::count_kind(LabelKind kind) const {
    int64_t n = 0;
    for (int32_t l : labels)
        if (label_kind(l) == kind) ++n;
    return n;
}

BasinGrid rasterize(const EntireFunction& fun, const GridSpec& spec, const OrbitConfig& cfg,
                    int workers) {
    if (!spec.valid()) throw std::invalid_argument("rasterize: invalid grid spec");
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;

    const size_t n = static_cast<size_t>(spec.cols) * spec.rows;
    std::vector<uint8_t> kinds(n, static_cast<uint8_t>(OrbitKind::Indeterminate));
    std::vector<uint16_t> local_ref(n, 0);
    std::vector<uint16_t> dir_q(n, kNoDirection);
    std::vector<uint16_t> iters(n, 0);

    const int tile_rows = 8;
    const int tile_count = (spec.rows + tile_rows - 1) / tile_rows;
    std::vector<std::vector<Complex>> tile_candidates(static_cast<size_t>(tile_count));

    std::atomic<int> next_tile{0};
    auto worker = [&]() {
        EvalScratch scratch;
        for (;;) {
            int tile = next_tile.fetch_add(1);
            if (tile >= tile_count) break;
            auto& candidates = tile_candidates[static_cast<size_t>(tile)];
            int j0 = tile * tile_rows;
            int j1 = std::min(spec.rows, j0 + tile_rows);
            for (int j = j0; j < j1; ++j) {
                for (int i = 0; i < spec.cols; ++i) {
                    size_t idx = static_cast<size_t>(j) * spec.cols + i;
                    OrbitCore core = classify_orbit(fun, spec.pixel_center(i, j), cfg, scratch);
                    kinds[idx] = static_cast<uint8_t>(core.kind);
                    iters[idx] = static_cast<uint16_t>(
                        std::min(core.iterations, static_cast<int>(0xFFFF)));
                    if (core.kind == OrbitKind::Root) {
                        // Dedup within the tile so the shared list stays tiny.
                        int found = -1;
                        for (size_t c = 0; c < candidates.size(); ++c) {
                            if (std::abs(candidates[c] - core.root_position) <=
                                cfg.root_merge_distance) {
                                found = static_cast<int>(c);
                                break;
                            }
                        }
                        if (found < 0) {
                            found = static_cast<int>(candidates.size());
                            candidates.push_back(core.root_position);
                        }
                        local_ref[idx] = static_cast<uint16_t>(found);
                    } else if (core.kind == OrbitKind::Escape && core.direction) {
                        dir_q[idx] = quantize_direction(*core.direction);
                    }
                }
            }
        }
    };

    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // Canonical roots: tile-order concat, then position sort + dedup.
    std::vector<Complex> all_candidates;
    for (const auto& tc : tile_candidates)
        all_candidates.insert(all_candidates.end(), tc.begin(), tc.end());
    BasinGrid grid;
    grid.spec = spec;
    grid.roots = canonicalize_roots(std::move(all_candidates), fun, cfg);

    // Map tile-local candidate refs to canonical ids.
    std::vector<std::vector<int>> tile_map(static_cast<size_t>(tile_count));
    for (int t = 0; t < tile_count; ++t) {
        for (Complex c : tile_candidates[static_cast<size_t>(t)])
            tile_map[static_cast<size_t>(t)].push_back(
                grid.roots.find(c, cfg.root_merge_distance * 1.5));
    }

    // Escape clustering from the direction histogram.
    std::vector<int64_t> hist(kDirBins, 0);
    for (size_t idx = 0; idx < n; ++idx)
        if (kinds[idx] == static_cast<uint8_t>(OrbitKind::Escape) && dir_q[idx] != kNoDirection)
            ++hist[dir_q[idx]];
    grid.clusters = cluster_histogram(hist, cfg.direction_epsilon);

    // Cluster bin ranges for assignment, matching cluster order.
    std::vector<std::pair<int, int>> ranges;
    {
        const int gap_bins =
            std::max(1, static_cast<int>(cfg.direction_epsilon / (kTau / kDirBins)));
        std::vector<std::pair<int, int>> runs;
        int run_start = -1, last_occ = -1;
        for (int q = 0; q < kDirBins; ++q) {
            if (hist[q] == 0) continue;
            if (run_start < 0)
                run_start = q;
            else if (q - last_occ > gap_bins) {
                runs.push_back({run_start, last_occ});
                run_start = q;
            }
            last_occ = q;
        }
        if (run_start >= 0) runs.push_back({run_start, last_occ});
        if (runs.size() > 1) {
            int wrap_gap = (runs.front().first + kDirBins) - runs.back().second;
            if (wrap_gap <= gap_bins) {
                runs.back().second = runs.front().second + kDirBins;
                runs.erase(runs.begin());
            }
        }
        // Align run order with cluster (direction-sorted) order.
        std::vector<std::pair<double, std::pair<int, int>>> keyed;
        for (auto [a, b] : runs) {
            double cx = 0.0, cy = 0.0;
            for (int q = a; q <= b; ++q) {
                int qq = q % kDirBins;
                if (hist[qq] == 0) continue;
                cx += hist[qq] * std::cos(bin_center(qq));
                cy += hist[qq] * std::sin(bin_center(qq));
            }
            double dir = std::atan2(cy, cx);
            if (dir < 0.0) dir += kTau;
            keyed.push_back({dir, {a, b}});
        }
        std::sort(keyed.begin(), keyed.end());
        for (auto& k : keyed) ranges.push_back(k.second);
    }

    // Final labels.
    grid.labels.assign(n, make_label(LabelKind::Indeterminate));
    grid.iterations = std::move(iters);
    for (int t = 0; t < tile_count; ++t) {
        int j0 = t * tile_rows;
        int j1 = std::min(spec.rows, j0 + tile_rows);
        for (int j = j0; j < j1; ++j) {
            for (int i = 0; i < spec.cols; ++i) {
                size_t idx = static_cast<size_t>(j) * spec.cols + i;
                switch (static_cast<OrbitKind>(kinds[idx])) {
                    case OrbitKind::Root: {
                        int id = tile_map[static_cast<size_t>(t)][local_ref[idx]];
                        grid.labels[idx] = id >= 0 ? make_label(LabelKind::Root, id)
                                                   : make_label(LabelKind::Indeterminate);
                        break;
                    }
                    case OrbitKind::Escape: {
                        if (dir_q[idx] == kNoDirection) {
                            grid.labels[idx] = make_label(LabelKind::EscapeRejected);
                        } else {
                            int c = assign_cluster(dir_q[idx], ranges);
                            grid.labels[idx] = c >= 0
                                                   ? make_label(LabelKind::EscapeCluster, c)
                                                   : make_label(LabelKind::EscapeRejected);
                        }
                        break;
                    }
                    case OrbitKind::PoleHit:
                        grid.labels[idx] = make_label(LabelKind::Pole);
                        break;
                    case OrbitKind::Indeterminate:
                        grid.labels[idx] = make_label(LabelKind::Indeterminate);
                        break;
                }
            }
        }
    }

    // 4-connected components within equal labels.
    UnionFind uf(n);
    for (int j = 0; j < spec.rows; ++j) {
        for (int i = 0; i < spec.cols; ++i) {
            size_t idx = static_cast<size_t>(j) * spec.cols + i;
            if (i + 1 < spec.cols && grid.labels[idx] == grid.labels[idx + 1])
                uf.unite(static_cast<int32_t>(idx), static_cast<int32_t>(idx + 1));
            if (j + 1 < spec.rows && grid.labels[idx] == grid.labels[idx + spec.cols])
                uf.unite(static_cast<int32_t>(idx), static_cast<int32_t>(idx + spec.cols));
        }
    }
    grid.components.assign(n, -1);
    int32_t next_comp = 0;
    std::vector<int32_t> dense(n, -1);
    for (size_t idx = 0; idx < n; ++idx) {
        int32_t r = uf.find(static_cast<int32_t>(idx));
        if (dense[static_cast<size_t>(r)] < 0) dense[static_cast<size_t>(r)] = next_comp++;
        grid.components[idx] = dense[static_cast<size_t>(r)];
    }
    return grid;
}

Mask immediate_basin(const BasinGrid& grid, int root_id) {
    if (root_id < 0 || root_id >= grid.roots.size())
        throw RootOutsideGrid("unknown root id " + std::to_string(root_id));
    Complex xi = grid.roots.entry(root_id).position;
    int i0, j0;
    if (!grid.spec.locate(xi, i0, j0))
        throw RootOutsideGrid("root " + std::to_string(root_id) + " lies outside the grid");
    const int32_t want = make_label(LabelKind::Root, root_id);

    // Usually the pixel containing the root carries its label; near-pole
    // speckle can displace it, so search outward a few rings if needed.
    int si = -1, sj = -1;
    for (int radius = 0; radius <= 4 && si < 0; ++radius) {
        for (int dj = -radius; dj <= radius && si < 0; ++dj) {
            for (int di = -radius; di <= radius && si < 0; ++di) {
                if (std::max(std::abs(di), std::abs(dj)) != radius) continue;
                int i = i0 + di, j = j0 + dj;
                if (i < 0 || j < 0 || i >= grid.spec.cols || j >= grid.spec.rows) continue;
                if (grid.label_at(i, j) == want) {
                    si = i;
                    sj = j;
                }
            }
        }
    }
    Mask mask(grid.spec.cols, grid.spec.rows);
    if (si < 0) return mask; // no labeled pixel near the root
    int32_t comp = grid.components[grid.index(si, sj)];
    const size_t n = grid.labels.size();
    for (size_t idx = 0; idx < n; ++idx)
        if (grid.components[idx] == comp) mask.bits[idx] = 1;
    return mask;
}

std::vector<HoleComponent> detect_holes(const Mask& mask, const Mask* dont_care) {
    const int cols = mask.cols, rows = mask.rows;
    const size_t n = static_cast<size_t>(cols) * rows;
    std::vector<uint8_t> visited(n, 0);
    std::vector<HoleComponent> holes;
    std::vector<size_t> stack;

    for (size_t start = 0; start < n; ++start) {
        if (mask.bits[start] || visited[start]) continue;
        visited[start] = 1;
        stack.clear();
        stack.push_back(start);
        HoleComponent comp;
        bool boundary = false;
        comp.min_i = cols;
        comp.min_j = rows;
        comp.max_i = -1;
        comp.max_j = -1;
        while (!stack.empty()) {
            size_t idx = stack.back();
            stack.pop_back();
            int i = static_cast<int>(idx % cols);
            int j = static_cast<int>(idx / cols);
            comp.pixels.push_back(idx);
            comp.min_i = std::min(comp.min_i, i);
            comp.max_i = std::max(comp.max_i, i);
            comp.min_j = std::min(comp.min_j, j);
            comp.max_j = std::max(comp.max_j, j);
            if (i == 0 || j == 0 || i == cols - 1 || j == rows - 1) boundary = true;
            if (!dont_care || !dont_care->bits[idx]) comp.contains_classified = true;
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    int ni = i + di, nj = j + dj;
                    if (ni < 0 || nj < 0 || ni >= cols || nj >= rows) continue;
                    size_t nidx = static_cast<size_t>(nj) * cols + ni;
                    if (mask.bits[nidx] || visited[nidx]) continue;
                    visited[nidx] = 1;
                    stack.push_back(nidx);
                }
            }
        }
        if (!boundary && comp.contains_classified) holes.push_back(std::move(comp));
    }
    return holes;
}

bool hole_confirmed_at_2x(const HoleComponent& hole, int base_cols,
                          const std::vector<HoleComponent>& fine_holes, int fine_cols) {
    int scale = fine_cols / base_cols;
    if (scale < 1) scale = 1;
    int a_min_i = hole.min_i * scale, a_max_i = (hole.max_i + 1) * scale - 1;
    int a_min_j = hole.min_j * scale, a_max_j = (hole.max_j + 1) * scale - 1;
    for (const HoleComponent& f : fine_holes) {
        bool overlap = !(f.max_i < a_min_i || f.min_i > a_max_i || f.max_j < a_min_j ||
                         f.min_j > a_max_j);
        if (overlap) return true;
    }
    return false;
}

UnboundedReport check_unbounded(const EntireFunction& fun, Complex root, const GridSpec& spec,
                                double growth_factor, int rounds, const OrbitConfig& cfg,
                                int workers, bool scale_resolution, int max_cols) {
    if (rounds < 1) throw std::invalid_argument("check_unbounded: rounds must be >= 1");
    UnboundedReport report;
    report.root = root;
    report.pass = true;
    double factor = growth_factor;
    for (int r = 0; r < rounds; ++r, factor *= growth_factor) {
        GridSpec round_spec = spec;
        round_spec.width = spec.width * factor;
        round_spec.height = spec.height * factor;
        if (scale_resolution) {
            round_spec.cols = std::min(max_cols, static_cast<int>(spec.cols * factor));
            round_spec.rows = std::min(max_cols, static_cast<int>(spec.rows * factor));
        }
        BasinGrid grid = rasterize(fun, round_spec, cfg, workers);
        UnboundedRound round;
        round.spec = round_spec;
        int id = grid.roots.find(root, cfg.root_merge_distance);
        if (id >= 0) {
            Mask mask = immediate_basin(grid, id);
            round.mask_pixels = mask.count();
            round.touches = mask.touches_boundary();
        }
        report.pass = report.pass && round.touches;
        report.rounds.push_back(round);
    }
    return report;
}

} // namespace nbasin
