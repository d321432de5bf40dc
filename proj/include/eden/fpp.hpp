#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_set>
#include <vector>

#include "eden/lattice.hpp"

namespace eden {

constexpr double kInfDist = std::numeric_limits<double>::infinity();

// Per-vertex distance to the base layer and predecessor links. Indexed by
// window vertex id; level-0 vertices have distance 0 and no predecessor.
struct PassageTimeMap {
    const LatticeWindow* window = nullptr;
    std::vector<double> dist;
    std::vector<int> pred;  // -1 for base vertices and unreachable ones

    double dist_of(const VertexId& v) const { return dist[window->vid_of(v)]; }
};

struct Path {
    std::vector<VertexId> vertices;  // ordered from the query vertex to the base
    double total_weight = 0.0;
};

struct Forest {
    const LatticeWindow* window = nullptr;
    std::vector<int> root;  // base index of the geodesic endpoint, -1 if unreachable
};

struct TreeStats {
    int height = 0;
    std::vector<std::int64_t> level_sizes;  // w_n for n = 0..H
    std::int64_t max_level_size = 0;        // w
    std::int64_t volume = 0;
    int max_displacement = 0;  // base-graph distance from the root, over tree vertices
};

struct GrowthSet {
    double time = 0.0;
    std::vector<int> vids;   // sorted
    std::vector<int> roots;  // parallel to vids; base index of the root
};

// Leveled dynamic program for the directed metric: each level depends only
// on the level below, so the scan is exact in one pass. Ties broken by
// canonical neighbor order (first argmin wins).
inline PassageTimeMap directed_passage_times(const LatticeWindow& window,
                                             const WeightField& field) {
    if (window.variant() != Variant::Directed)
        fail(Errc::variant_mismatch, "directed_passage_times requires a directed window");
    const int B = window.base_size(), H = window.height();
    PassageTimeMap ptm;
    ptm.window = &window;
    ptm.dist.assign(window.vertex_count(), kInfDist);
    ptm.pred.assign(window.vertex_count(), -1);
    for (int b = 0; b < B; ++b) ptm.dist[b] = 0.0;
    for (int n = 1; n <= H; ++n) {
        for (int b = 0; b < B; ++b) {
            const int v = window.vid(b, n);
            double best = kInfDist;
            int best_pred = -1;
            for (int nb : window.base_adjacency(b)) {
                if (nb < 0) continue;
                const int u = window.vid(nb, n - 1);
                if (ptm.dist[u] == kInfDist) continue;
                const double w = field.weight_from_hash(window.edge_hash(nb, n - 1, b, n));
                const double cand = ptm.dist[u] + w;
                if (cand < best) {
                    best = cand;
                    best_pred = u;
                }
            }
            ptm.dist[v] = best;
            ptm.pred[v] = best_pred;
        }
    }
    return ptm;
}

// Multi-source Dijkstra from the whole base layer under the restricted
// undirected metric of the window. Deterministic under ties: the heap is
// keyed by (distance, vertex id) and relaxation is strict.
inline PassageTimeMap undirected_passage_times(const LatticeWindow& window,
                                               const WeightField& field) {
    if (window.variant() != Variant::Undirected)
        fail(Errc::variant_mismatch, "undirected_passage_times requires an undirected window");
    const int B = window.base_size(), H = window.height();
    PassageTimeMap ptm;
    ptm.window = &window;
    ptm.dist.assign(window.vertex_count(), kInfDist);
    ptm.pred.assign(window.vertex_count(), -1);

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (int b = 0; b < B; ++b) {
        ptm.dist[b] = 0.0;
        heap.emplace(0.0, b);
    }
    auto relax = [&](int u, int v, double w) {
        const double cand = ptm.dist[u] + w;
        if (cand < ptm.dist[v]) {
            ptm.dist[v] = cand;
            ptm.pred[v] = u;
            heap.emplace(cand, v);
        }
    };
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > ptm.dist[u]) continue;
        const int lvl = window.vid_level(u), b = window.vid_base(u);
        if (lvl > 0)
            relax(u, window.vid(b, lvl - 1), field.weight_from_hash(window.edge_hash(b, lvl - 1, b, lvl)));
        if (lvl < H)
            relax(u, window.vid(b, lvl + 1), field.weight_from_hash(window.edge_hash(b, lvl, b, lvl + 1)));
        if (lvl >= 1) {
            for (int nb : window.base_adjacency(b)) {
                if (nb < 0) continue;
                relax(u, window.vid(nb, lvl), field.weight_from_hash(window.horizontal_edge_hash(b, nb, lvl)));
            }
        }
    }
    return ptm;
}

inline PassageTimeMap passage_times(const LatticeWindow& window, const WeightField& field) {
    return window.variant() == Variant::Directed ? directed_passage_times(window, field)
                                                 : undirected_passage_times(window, field);
}

inline Path geodesic(const PassageTimeMap& ptm, const VertexId& v) {
    const int start = ptm.window->vid_of(v);
    if (ptm.dist[start] == kInfDist) fail(Errc::unreachable, "vertex has no finite passage time");
    Path path;
    path.total_weight = ptm.dist[start];
    for (int u = start; u != -1; u = ptm.pred[u]) path.vertices.push_back(ptm.window->vertex(u));
    return path;
}

inline Forest forest_from(const PassageTimeMap& ptm) {
    const LatticeWindow& w = *ptm.window;
    Forest forest;
    forest.window = &w;
    forest.root.assign(w.vertex_count(), -1);
    for (int b = 0; b < w.base_size(); ++b) forest.root[b] = b;
    // Iterative predecessor chase with memoization along the chain.
    std::vector<int> chain;
    for (int v = 0; v < w.vertex_count(); ++v) {
        if (forest.root[v] != -1 || ptm.dist[v] == kInfDist) continue;
        chain.clear();
        int u = v;
        while (forest.root[u] == -1) {
            chain.push_back(u);
            u = ptm.pred[u];
            if (u == -1) fail(Errc::model_bug, "finite-distance vertex without a base-terminated chain");
        }
        for (int c : chain) forest.root[c] = forest.root[u];
    }
    return forest;
}

// T^n(x) computed from scratch on the height-n restriction of the window.
// The restricted undirected metric genuinely differs from a slice of a
// taller forest, so the recomputation is part of the definition.
inline std::vector<VertexId> level_set(const LatticeWindow& window, const WeightField& field,
                                       const Element& x, int n) {
    if (n > window.height()) fail(Errc::out_of_window, "level beyond window height");
    LatticeWindow restricted(window.base(), window.variant(), n, window.mode(),
                             window.strip_radius());
    PassageTimeMap ptm = passage_times(restricted, field);
    Forest forest = forest_from(ptm);
    const int xb = restricted.base_index(x);
    if (xb < 0) fail(Errc::out_of_window, "base vertex outside window");
    std::vector<VertexId> out;
    for (int b = 0; b < restricted.base_size(); ++b) {
        const int v = restricted.vid(b, n);
        if (forest.root[v] == xb) out.push_back(restricted.vertex(v));
    }
    return out;
}

inline TreeStats tree_stats(const Forest& forest, const Element& x) {
    const LatticeWindow& w = *forest.window;
    const int xb = w.base_index(x);
    if (xb < 0) fail(Errc::out_of_window, "base vertex outside window");
    TreeStats stats;
    stats.level_sizes.assign(w.height() + 1, 0);
    for (int v = 0; v < w.vertex_count(); ++v) {
        if (forest.root[v] != xb) continue;
        const int lvl = w.vid_level(v);
        ++stats.level_sizes[lvl];
        ++stats.volume;
        stats.height = std::max(stats.height, lvl);
        stats.max_displacement = std::max(
            stats.max_displacement, w.base().base_distance(w.base_elements()[w.vid_base(v)], x));
    }
    for (std::int64_t s : stats.level_sizes) stats.max_level_size = std::max(stats.max_level_size, s);
    return stats;
}

inline GrowthSet growth_set(const PassageTimeMap& ptm, const Forest& forest, double t) {
    if (!(t > 0)) fail(Errc::domain_error, "growth_set requires t > 0");
    GrowthSet g;
    g.time = t;
    for (int v = 0; v < static_cast<int>(ptm.dist.size()); ++v) {
        if (ptm.dist[v] < t) {
            g.vids.push_back(v);
            g.roots.push_back(forest.root[v]);
        }
    }
    return g;
}

// Point-centered ball B(x,t) under the full window metric.
inline std::vector<int> fpp_ball(const LatticeWindow& window, const WeightField& field,
                                 const VertexId& center, double t) {
    if (window.variant() != Variant::Undirected)
        fail(Errc::variant_mismatch, "fpp_ball is defined for the undirected metric");
    const int H = window.height();
    std::vector<double> dist(window.vertex_count(), kInfDist);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    const int c = window.vid_of(center);
    dist[c] = 0.0;
    heap.emplace(0.0, c);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u] || d >= t) continue;
        const int lvl = window.vid_level(u), b = window.vid_base(u);
        auto relax = [&](int v, double w) {
            const double cand = dist[u] + w;
            if (cand < dist[v]) {
                dist[v] = cand;
                heap.emplace(cand, v);
            }
        };
        if (lvl > 0) relax(window.vid(b, lvl - 1), field.weight_from_hash(window.edge_hash(b, lvl - 1, b, lvl)));
        if (lvl < H) relax(window.vid(b, lvl + 1), field.weight_from_hash(window.edge_hash(b, lvl, b, lvl + 1)));
        if (lvl >= 1)
            for (int nb : window.base_adjacency(b)) {
                if (nb < 0) continue;
                relax(window.vid(nb, lvl), field.weight_from_hash(window.horizontal_edge_hash(b, nb, lvl)));
            }
    }
    std::vector<int> out;
    for (int v = 0; v < window.vertex_count(); ++v)
        if (dist[v] < t) out.push_back(v);
    return out;
}

// Inner vertex boundary of S against the complement inside the full graph
// G x Z+: neighbors above the height cap or beyond the strip wall count as
// complement even though they are not window vertices.
inline std::vector<int> inner_boundary(const std::vector<int>& sorted_vids,
                                       const LatticeWindow& window) {
    auto in_set = [&](int v) {
        return std::binary_search(sorted_vids.begin(), sorted_vids.end(), v);
    };
    std::vector<int> out;
    for (int v : sorted_vids) {
        const int lvl = window.vid_level(v), b = window.vid_base(v);
        bool boundary = false;
        auto check = [&](int u) {
            if (u < 0 || !in_set(u)) boundary = true;  // u < 0: neighbor outside the window
        };
        if (window.variant() == Variant::Undirected) {
            if (lvl > 0) check(window.vid(b, lvl - 1));  // no vertex below the base layer
            check(lvl < window.height() ? window.vid(b, lvl + 1) : -1);
            if (lvl >= 1)
                for (int nb : window.base_adjacency(b)) check(nb < 0 ? -1 : window.vid(nb, lvl));
        } else {
            if (lvl > 0)
                for (int nb : window.base_adjacency(b)) check(nb < 0 ? -1 : window.vid(nb, lvl - 1));
            if (lvl < window.height())
                for (int nb : window.base_adjacency(b)) check(nb < 0 ? -1 : window.vid(nb, lvl + 1));
            else
                boundary = true;  // directed in-edges from level H+1 exist in the full graph
        }
        if (boundary) out.push_back(v);
    }
    return out;
}

// Exhaustive path-enumeration oracle. Directed: all downward paths.
// Undirected: all simple paths to the base layer within the window.
// Weights accumulate from the base end, matching the kernels bit-exactly.
class PathOracle {
public:
    PathOracle(const LatticeWindow& window, const WeightField& field,
               std::size_t path_budget = 1'000'000)
        : window_(window), field_(field), budget_(path_budget) {}

    double passage_time(const VertexId& v) {
        paths_seen_ = 0;
        const int start = window_.vid_of(v);
        if (window_.vid_level(start) == 0) return 0.0;
        best_ = kInfDist;
        weights_.clear();
        if (window_.variant() == Variant::Directed) {
            descend_directed(start);
        } else {
            on_path_.assign(window_.vertex_count(), false);
            on_path_[start] = true;
            wander_undirected(start);
        }
        return best_;
    }

private:
    void account_path() {
        if (++paths_seen_ > budget_) fail(Errc::oracle_budget, "oracle path budget exceeded");
        double total = 0.0;
        for (std::size_t i = weights_.size(); i-- > 0;) total += weights_[i];
        if (total < best_) best_ = total;
    }

    void descend_directed(int v) {
        const int lvl = window_.vid_level(v), b = window_.vid_base(v);
        if (lvl == 0) {
            account_path();
            return;
        }
        for (int nb : window_.base_adjacency(b)) {
            if (nb < 0) continue;
            weights_.push_back(field_.weight_from_hash(window_.edge_hash(nb, lvl - 1, b, lvl)));
            descend_directed(window_.vid(nb, lvl - 1));
            weights_.pop_back();
        }
    }

    void wander_undirected(int v) {
        const int lvl = window_.vid_level(v), b = window_.vid_base(v);
        if (lvl == 0) {
            account_path();
            return;
        }
        auto step = [&](int u, double w) {
            if (on_path_[u]) return;
            on_path_[u] = true;
            weights_.push_back(w);
            wander_undirected(u);
            weights_.pop_back();
            on_path_[u] = false;
        };
        step(window_.vid(b, lvl - 1), field_.weight_from_hash(window_.edge_hash(b, lvl - 1, b, lvl)));
        if (lvl < window_.height())
            step(window_.vid(b, lvl + 1), field_.weight_from_hash(window_.edge_hash(b, lvl, b, lvl + 1)));
        if (lvl >= 1)
            for (int nb : window_.base_adjacency(b)) {
                if (nb < 0) continue;
                step(window_.vid(nb, lvl), field_.weight_from_hash(window_.horizontal_edge_hash(b, nb, lvl)));
            }
    }

    const LatticeWindow& window_;
    const WeightField& field_;
    std::size_t budget_;
    std::size_t paths_seen_ = 0;
    double best_ = kInfDist;
    std::vector<double> weights_;
    std::vector<bool> on_path_;
};

inline double brute_force_passage_time(const LatticeWindow& window, const WeightField& field,
                                       const VertexId& v, std::size_t path_budget = 1'000'000) {
    PathOracle oracle(window, field, path_budget);
    return oracle.passage_time(v);
}

struct StabilizationReport {
    std::size_t vertices_checked = 0;
    std::size_t mismatches = 0;
    double fraction() const {
        return vertices_checked ? static_cast<double>(mismatches) / vertices_checked : 0.0;
    }
};

// Compares (distance, root) on the low region between two window heights
// sharing base, mode and seed; certifies that truncation does not move the
// reported statistics.
inline StabilizationReport stabilization_check(const LatticeWindow& window_a,
                                               const LatticeWindow& window_b,
                                               const WeightField& field, int region_height) {
    if (window_a.base_size() != window_b.base_size() || window_a.variant() != window_b.variant())
        fail(Errc::config_error, "stabilization_check requires matching base and variant");
    if (region_height > window_a.height() || region_height > window_b.height())
        fail(Errc::out_of_window, "region exceeds a window height");
    PassageTimeMap pa = passage_times(window_a, field);
    PassageTimeMap pb = passage_times(window_b, field);
    Forest fa = forest_from(pa), fb = forest_from(pb);
    StabilizationReport report;
    const int B = window_a.base_size();
    for (int lvl = 0; lvl <= region_height; ++lvl) {
        for (int b = 0; b < B; ++b) {
            const int va = window_a.vid(b, lvl), vb = window_b.vid(b, lvl);
            ++report.vertices_checked;
            if (pa.dist[va] != pb.dist[vb] || fa.root[va] != fb.root[vb]) ++report.mismatches;
        }
    }
    return report;
}

}  // namespace eden
