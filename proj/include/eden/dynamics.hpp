#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "eden/chisq.hpp"
#include "eden/fpp.hpp"

namespace eden {

struct AdditionRecord {
    int from_vid = -1;  // occupied endpoint (-1 for base-layer seeds)
    int to_vid = -1;    // vertex added
    int root = -1;      // base index of the inherited root
    int step = 0;
    double time = 0.0;  // passage time in the coupled order, 0 for the chain
};

using AdditionSequence = std::vector<AdditionRecord>;

// Boundary edge of the growing occupied set: exactly one endpoint occupied,
// the unoccupied endpoint at level >= 1 (the base layer is always occupied).
struct BoundaryEdge {
    int from = -1;  // occupied
    int to = -1;    // unoccupied
    bool operator==(const BoundaryEdge& o) const { return from == o.from && to == o.to; }
    bool operator<(const BoundaryEdge& o) const {
        return std::pair(from, to) < std::pair(o.from, o.to);
    }
};

// Growth state of the stationary multi-source Eden chain. The occupied set
// starts as the whole base layer, each vertex its own root.
class EdenState {
public:
    explicit EdenState(const LatticeWindow& window) : window_(&window) {
        occupied_.assign(window.vertex_count(), false);
        root_.assign(window.vertex_count(), -1);
        for (int b = 0; b < window.base_size(); ++b) {
            occupied_[b] = true;
            root_[b] = b;
        }
        boundary_ = compute_boundary();
    }

    const LatticeWindow& window() const { return *window_; }
    bool occupied(int vid) const { return occupied_[vid]; }
    int root(int vid) const { return root_[vid]; }
    int step_count() const { return steps_; }
    const std::vector<BoundaryEdge>& boundary() const { return boundary_; }

    // Full recomputation from the occupied set; the incremental updates in
    // occupy() are cross-checked against this in tests.
    std::vector<BoundaryEdge> compute_boundary() const {
        std::vector<BoundaryEdge> out;
        for (int v = 0; v < window_->vertex_count(); ++v) {
            if (!occupied_[v]) continue;
            for (int u : window_->adjacent_vids(v))
                if (!occupied_[u] && window_->vid_level(u) >= 1) out.push_back({v, u});
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Takes the edge by value: callers typically pass a reference into
    // boundary_, which this method rewrites.
    AdditionRecord occupy(BoundaryEdge e) {
        if (occupied_[e.to]) fail(Errc::model_bug, "boundary edge into an occupied vertex");
        occupied_[e.to] = true;
        root_[e.to] = root_[e.from];
        ++steps_;
        // Drop edges that pointed into the new vertex, then add its fresh
        // boundary edges.
        boundary_.erase(std::remove_if(boundary_.begin(), boundary_.end(),
                                       [&](const BoundaryEdge& be) { return be.to == e.to; }),
                        boundary_.end());
        for (int u : window_->adjacent_vids(e.to))
            if (!occupied_[u] && window_->vid_level(u) >= 1) boundary_.push_back({e.to, u});
        return {e.from, e.to, root_[e.to], steps_, 0.0};
    }

private:
    const LatticeWindow* window_;
    std::vector<bool> occupied_;
    std::vector<int> root_;
    std::vector<BoundaryEdge> boundary_;
    int steps_ = 0;
};

// One Eden step: a uniform boundary edge is sampled and its outer endpoint
// occupied. In the multi-source chain the outer endpoint is unoccupied by
// construction, so every step adds a vertex.
inline AdditionRecord eden_step(EdenState& state, RngStream& rng) {
    const auto& boundary = state.boundary();
    if (boundary.empty()) fail(Errc::saturated, "window saturated: empty boundary");
    const std::uint64_t pick = rng.next_below(boundary.size());
    return state.occupy(boundary[static_cast<std::size_t>(pick)]);
}

namespace detail {

// Vertices ordered by increasing passage time; the FPP-side view of the
// growth process. No exponential-law guard (negative controls need it off).
inline AdditionSequence addition_order(const PassageTimeMap& ptm, const Forest& forest) {
    const LatticeWindow& w = *ptm.window;
    std::vector<int> order;
    order.reserve(w.vertex_count());
    for (int v = 0; v < w.vertex_count(); ++v)
        if (ptm.dist[v] < kInfDist) order.push_back(v);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (ptm.dist[a] != ptm.dist[b]) return ptm.dist[a] < ptm.dist[b];
        return a < b;
    });
    AdditionSequence seq;
    seq.reserve(order.size());
    int step = 0;
    for (int v : order) {
        if (!seq.empty() && ptm.dist[v] > 0.0 && ptm.dist[v] == seq.back().time) {
            fail(Errc::model_bug, "tie in passage times at vertices " +
                                      std::to_string(seq.back().to_vid) + " and " +
                                      std::to_string(v) + " (d=" + std::to_string(ptm.dist[v]) + ")");
        }
        seq.push_back({ptm.pred[v], v, forest.root[v], step++, ptm.dist[v]});
    }
    return seq;
}

}  // namespace detail

// Coupling of the exponential-weight FPP forest with the Eden chain: the
// occupied set grows by visiting vertices in increasing distance order.
inline AdditionSequence coupling_order(const PassageTimeMap& ptm, const Forest& forest,
                                       const DistributionSpec& dist) {
    if (dist.kind != DistributionSpec::Kind::Exponential)
        fail(Errc::coupling_invalid, "Eden coupling holds only for exponential weights");
    return detail::addition_order(ptm, forest);
}

struct StepClassResult {
    std::string class_key;  // occupied-set signature the step conditions on
    ChiSquareResult chi;
    std::size_t boundary_size = 0;
    std::size_t samples = 0;
};

struct StepReport {
    int step = 0;
    std::vector<StepClassResult> classes;
    std::size_t skipped_classes = 0;  // below the replica floor: underpowered
    double min_p_value = 1.0;
};

struct MemorylessnessReport {
    std::vector<StepReport> steps;
    std::size_t replicas = 0;
};

// For each of the first k additions of the FPP order, conditional on the
// occupied set so far, tests the next-edge distribution against uniform
// over the current boundary.
inline MemorylessnessReport memorylessness_test(const LatticeWindow& window,
                                                const DistributionSpec& dist, int steps_k,
                                                int replicas, std::uint64_t seed,
                                                std::size_t min_class_samples = 50) {
    if (steps_k < 1 || steps_k > 5)
        fail(Errc::domain_error, "memorylessness_test supports 1 <= k <= 5 steps");
    // Per replica: the first k added vertices with their entry edges.
    std::vector<std::vector<std::pair<int, int>>> additions(replicas);
    for (int r = 0; r < replicas; ++r) {
        WeightField field(derive_seed(seed, static_cast<std::uint64_t>(r)), dist);
        PassageTimeMap ptm = passage_times(window, field);
        Forest forest = forest_from(ptm);
        AdditionSequence seq = detail::addition_order(ptm, forest);
        auto& recs = additions[r];
        for (const AdditionRecord& rec : seq) {
            if (rec.time == 0.0) continue;  // base layer
            recs.emplace_back(rec.from_vid, rec.to_vid);
            if (static_cast<int>(recs.size()) == steps_k) break;
        }
    }

    MemorylessnessReport report;
    report.replicas = static_cast<std::size_t>(replicas);
    for (int step = 1; step <= steps_k; ++step) {
        StepReport sr;
        sr.step = step;
        // Conditioning class: the set of vertices occupied before this step.
        std::map<std::vector<int>, std::vector<std::pair<int, int>>> by_class;
        for (const auto& recs : additions) {
            if (static_cast<int>(recs.size()) < step) continue;
            std::vector<int> key;
            for (int i = 0; i < step - 1; ++i) key.push_back(recs[i].second);
            std::sort(key.begin(), key.end());
            by_class[key].push_back(recs[step - 1]);
        }
        for (const auto& [key, samples] : by_class) {
            if (samples.size() < min_class_samples) {
                ++sr.skipped_classes;
                continue;
            }
            EdenState state(window);
            // Greedy reconstruction of the occupied set: repeatedly occupy
            // any remaining class vertex currently on the boundary (a valid
            // order exists because the class arose from a real growth run).
            std::vector<int> remaining = key;
            while (!remaining.empty()) {
                BoundaryEdge entry{-1, -1};
                for (const BoundaryEdge& be : state.boundary()) {
                    if (std::find(remaining.begin(), remaining.end(), be.to) != remaining.end()) {
                        entry = be;
                        break;
                    }
                }
                if (entry.from < 0) fail(Errc::model_bug, "class vertices are not addable");
                state.occupy(entry);
                remaining.erase(std::find(remaining.begin(), remaining.end(), entry.to));
            }
            const auto& boundary = state.boundary();
            std::map<std::pair<int, int>, std::size_t> edge_slot;
            for (const BoundaryEdge& be : boundary)
                edge_slot[{be.from, be.to}] = edge_slot.size();
            std::vector<std::size_t> counts(boundary.size(), 0);
            for (const auto& obs : samples) {
                auto it = edge_slot.find(obs);
                if (it == edge_slot.end())
                    fail(Errc::model_bug, "observed addition is not a boundary edge of its class");
                ++counts[it->second];
            }
            StepClassResult cls;
            for (int v : key) cls.class_key += std::to_string(v) + ",";
            cls.boundary_size = boundary.size();
            cls.samples = samples.size();
            cls.chi = chi_square_test(counts,
                                      std::vector<double>(counts.size(), 1.0 / counts.size()));
            sr.min_p_value = std::min(sr.min_p_value, cls.chi.p_value);
            sr.classes.push_back(std::move(cls));
        }
        report.steps.push_back(std::move(sr));
    }
    return report;
}

// Exact marginal law of the k-th added edge of the Eden chain, by full
// enumeration of the first k steps. Small windows and k only.
inline std::map<std::pair<int, int>, double> exact_step_marginal(const LatticeWindow& window,
                                                                 int step_k,
                                                                 std::size_t state_budget = 100'000) {
    std::map<std::pair<int, int>, double> marginal;
    std::size_t states = 0;
    struct Frame {
        EdenState state;
        double prob;
        int depth;
    };
    std::vector<Frame> stack;
    stack.push_back({EdenState(window), 1.0, 0});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (++states > state_budget) fail(Errc::budget_exceeded, "chain enumeration budget exceeded");
        const auto boundary = f.state.boundary();
        const double p = f.prob / static_cast<double>(boundary.size());
        for (const BoundaryEdge& be : boundary) {
            if (f.depth + 1 == step_k) {
                marginal[{be.from, be.to}] += p;
            } else {
                Frame next{f.state, p, f.depth + 1};
                next.state.occupy(be);
                stack.push_back(std::move(next));
            }
        }
    }
    return marginal;
}

}  // namespace eden
