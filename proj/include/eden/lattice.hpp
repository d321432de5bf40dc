#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eden/common.hpp"
#include "eden/group.hpp"

namespace eden {

enum class Variant { Directed, Undirected };

inline std::string variant_name(Variant v) {
    return v == Variant::Directed ? "directed" : "undirected";
}

// Edge-weight law. Only non-atomic laws supported on [0, inf) with finite
// mean are admitted; atomic choices are rejected at config time.
struct DistributionSpec {
    enum class Kind { Exponential, Uniform, Weibull };
    Kind kind = Kind::Exponential;
    double a = 1.0;  // rate (exponential) | lower bound (uniform) | shape (weibull)
    double b = 0.0;  // upper bound (uniform) | scale (weibull)

    static DistributionSpec exponential(double rate) {
        if (!(rate > 0)) fail(Errc::config_error, "exponential rate must be positive");
        return {Kind::Exponential, rate, 0.0};
    }
    static DistributionSpec uniform(double lo, double hi) {
        if (!(lo >= 0 && lo < hi)) fail(Errc::config_error, "uniform requires 0 <= a < b");
        return {Kind::Uniform, lo, hi};
    }
    static DistributionSpec weibull(double shape, double scale) {
        if (!(shape > 0 && scale > 0)) fail(Errc::config_error, "weibull requires positive parameters");
        return {Kind::Weibull, shape, scale};
    }

    double mean() const {
        switch (kind) {
            case Kind::Exponential: return 1.0 / a;
            case Kind::Uniform: return 0.5 * (a + b);
            case Kind::Weibull: return b * std::tgamma(1.0 + 1.0 / a);
        }
        return 0.0;
    }

    double cdf(double x) const {
        if (x <= 0) return 0.0;
        switch (kind) {
            case Kind::Exponential: return 1.0 - std::exp(-a * x);
            case Kind::Uniform:
                if (x <= a) return 0.0;
                if (x >= b) return 1.0;
                return (x - a) / (b - a);
            case Kind::Weibull: return 1.0 - std::exp(-std::pow(x / b, a));
        }
        return 0.0;
    }

    std::string name() const {
        switch (kind) {
            case Kind::Exponential: return "exponential";
            case Kind::Uniform: return "uniform";
            case Kind::Weibull: return "weibull";
        }
        return "?";
    }
};

// Exact quantile functions.
inline double inverse_cdf(const DistributionSpec& dist, double u) {
    if (!(u >= 0.0 && u < 1.0)) fail(Errc::domain_error, "inverse_cdf requires u in [0,1)");
    switch (dist.kind) {
        case DistributionSpec::Kind::Exponential: return -std::log1p(-u) / dist.a;
        case DistributionSpec::Kind::Uniform: return dist.a + (dist.b - dist.a) * u;
        case DistributionSpec::Kind::Weibull:
            return dist.b * std::pow(-std::log1p(-u), 1.0 / dist.a);
    }
    return 0.0;
}

struct VertexId {
    Element element;
    int level = 0;

    bool operator==(const VertexId& o) const { return level == o.level && element == o.element; }
    bool operator<(const VertexId& o) const {
        if (level != o.level) return level < o.level;
        return element < o.element;
    }
};

// Canonically ordered endpoint pair. The directed variant stores
// (upper, lower); the undirected variant orders endpoints by
// (level, element key) so both orientations map to one id.
struct EdgeId {
    VertexId a;  // directed: upper endpoint; undirected: canonical first
    VertexId b;

    bool operator==(const EdgeId& o) const { return a == o.a && b == o.b; }
    bool operator<(const EdgeId& o) const { return std::tie(a, b) < std::tie(o.a, o.b); }
};

enum class BoundaryMode { Periodic, Strip };

// A finite window onto G x Z+, levels 0..H. Base elements are indexed
// densely; vertex ids are level * base_size + base_index.
class LatticeWindow {
public:
    LatticeWindow(GroupSpec base, Variant variant, int height, BoundaryMode mode,
                  int strip_radius = 0, std::size_t vertex_budget = 50'000'000)
        : base_(std::move(base)), variant_(variant), height_(height), mode_(mode),
          strip_radius_(strip_radius) {
        if (height < 0) fail(Errc::config_error, "window height must be nonnegative");
        if (mode == BoundaryMode::Periodic) {
            if (base_.kind() != GroupSpec::Kind::Cycle && base_.kind() != GroupSpec::Kind::Torus)
                fail(Errc::config_error, "periodic boundary requires a cycle or torus base");
            std::size_t n = 1;
            for (int len : base_.lengths()) n *= static_cast<std::size_t>(len);
            elements_ = base_.ball(base_.identity(), total_diameter(), n + 1);
        } else {
            if (strip_radius < 0) fail(Errc::config_error, "strip radius must be nonnegative");
            elements_ = base_.ball(base_.identity(), strip_radius, vertex_budget);
        }
        if (elements_.size() * static_cast<std::size_t>(height + 1) > vertex_budget)
            fail(Errc::budget_exceeded, "window exceeds vertex budget");
        std::sort(elements_.begin(), elements_.end());
        for (std::size_t i = 0; i < elements_.size(); ++i) index_[elements_[i]] = static_cast<int>(i);

        // Base adjacency in canonical neighbor order; -1 marks neighbors
        // outside a strip window.
        adj_.resize(elements_.size());
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            for (const Element& y : base_.neighbors(elements_[i])) {
                auto it = index_.find(y);
                adj_[i].push_back(it == index_.end() ? -1 : it->second);
            }
        }

        element_keys_.reserve(elements_.size());
        for (const Element& x : elements_) element_keys_.push_back(base_.canonical_key(x));
    }

    const GroupSpec& base() const { return base_; }
    Variant variant() const { return variant_; }
    int height() const { return height_; }
    BoundaryMode mode() const { return mode_; }
    int strip_radius() const { return strip_radius_; }

    int base_size() const { return static_cast<int>(elements_.size()); }
    int vertex_count() const { return base_size() * (height_ + 1); }
    const std::vector<Element>& base_elements() const { return elements_; }
    const std::vector<int>& base_adjacency(int base_index) const { return adj_[base_index]; }

    int base_index(const Element& x) const {
        auto it = index_.find(x);
        return it == index_.end() ? -1 : it->second;
    }

    int vid(int base_index, int level) const { return level * base_size() + base_index; }
    int vid_level(int v) const { return v / base_size(); }
    int vid_base(int v) const { return v % base_size(); }

    VertexId vertex(int v) const { return {elements_[vid_base(v)], vid_level(v)}; }

    int vid_of(const VertexId& v) const {
        if (v.level < 0 || v.level > height_) fail(Errc::out_of_window, "level outside window");
        int b = base_index(v.element);
        if (b < 0) fail(Errc::out_of_window, "element outside window");
        return vid(b, v.level);
    }

    bool contains(const VertexId& v) const {
        return v.level >= 0 && v.level <= height_ && base_index(v.element) >= 0;
    }

    // Neighboring vertex ids under window adjacency (both directions of
    // directed edges). Used for boundary scans.
    std::vector<int> adjacent_vids(int v) const {
        std::vector<int> out;
        int lvl = vid_level(v), b = vid_base(v);
        if (variant_ == Variant::Directed) {
            if (lvl > 0)
                for (int nb : adj_[b])
                    if (nb >= 0) out.push_back(vid(nb, lvl - 1));
            if (lvl < height_)
                for (int nb : adj_[b])
                    if (nb >= 0) out.push_back(vid(nb, lvl + 1));
        } else {
            if (lvl >= 1)
                for (int nb : adj_[b])
                    if (nb >= 0) out.push_back(vid(nb, lvl));
            if (lvl > 0) out.push_back(vid(b, lvl - 1));
            if (lvl < height_) out.push_back(vid(b, lvl + 1));
        }
        return out;
    }

    std::vector<EdgeId> incident_edges(const VertexId& v, bool include_upward = true) const {
        int w = vid_of(v);
        std::vector<EdgeId> out;
        for (int u : adjacent_vids(w)) {
            VertexId other = vertex(u);
            if (!include_upward && other.level > v.level) continue;
            out.push_back(make_edge(v, other));
        }
        return out;
    }

    EdgeId make_edge(const VertexId& u, const VertexId& v) const {
        if (variant_ == Variant::Directed) {
            if (std::abs(u.level - v.level) != 1)
                fail(Errc::invalid_element, "directed edge endpoints must differ by one level");
            return u.level > v.level ? EdgeId{u, v} : EdgeId{v, u};
        }
        if (u.level != v.level) return u.level < v.level ? EdgeId{u, v} : EdgeId{v, u};
        ByteKey ku = base_.canonical_key(u.element), kv = base_.canonical_key(v.element);
        return ku <= kv ? EdgeId{u, v} : EdgeId{v, u};
    }

    // Canonical byte identity of an edge. Depends only on the variant and
    // the two endpoints, never on the window, so a given edge keeps its
    // weight when the window grows.
    ByteKey edge_bytes(const EdgeId& e) const {
        const ByteKey ka = base_.canonical_key(e.a.element);
        const ByteKey kb = base_.canonical_key(e.b.element);
        // Lower-level endpoint first; horizontal edges already canonically
        // ordered by make_edge.
        const VertexId *first = &e.a, *second = &e.b;
        const ByteKey *kfirst = &ka, *ksecond = &kb;
        if (e.a.level > e.b.level || (e.a.level == e.b.level && kb < ka)) {
            std::swap(first, second);
            std::swap(kfirst, ksecond);
        }
        ByteKey out;
        out.push_back(variant_ == Variant::Directed ? 0x44 : 0x55);
        put_u32(out, static_cast<std::uint32_t>(first->level));
        put_u32(out, static_cast<std::uint32_t>(kfirst->size()));
        out.insert(out.end(), kfirst->begin(), kfirst->end());
        put_u32(out, static_cast<std::uint32_t>(second->level));
        put_u32(out, static_cast<std::uint32_t>(ksecond->size()));
        out.insert(out.end(), ksecond->begin(), ksecond->end());
        return out;
    }

    // Fast path used by the kernels: content hash of edge_bytes computed
    // from precomputed element keys without allocation.
    std::uint64_t edge_hash(int base_lo, int level_lo, int base_hi, int level_hi) const {
        // (lo) must be the canonically-first endpoint; callers pass the
        // lower level first, or for horizontal edges the smaller key first.
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix_byte = [&h](std::uint8_t byte) {
            h ^= byte;
            h *= 0x100000001b3ULL;
        };
        auto mix_u32 = [&](std::uint32_t v) {
            mix_byte(static_cast<std::uint8_t>(v));
            mix_byte(static_cast<std::uint8_t>(v >> 8));
            mix_byte(static_cast<std::uint8_t>(v >> 16));
            mix_byte(static_cast<std::uint8_t>(v >> 24));
        };
        mix_byte(variant_ == Variant::Directed ? 0x44 : 0x55);
        for (auto [b, lvl] : {std::pair{base_lo, level_lo}, std::pair{base_hi, level_hi}}) {
            mix_u32(static_cast<std::uint32_t>(lvl));
            const ByteKey& k = element_keys_[b];
            mix_u32(static_cast<std::uint32_t>(k.size()));
            for (std::uint8_t byte : k) mix_byte(byte);
        }
        return splitmix64(splitmix64(h));
    }

    std::uint64_t horizontal_edge_hash(int base_a, int base_b, int level) const {
        if (element_keys_[base_b] < element_keys_[base_a]) std::swap(base_a, base_b);
        return edge_hash(base_a, level, base_b, level);
    }

    const ByteKey& element_key(int base_index) const { return element_keys_[base_index]; }

    int total_diameter() const {
        // Upper bound on base graph diameter for periodic windows.
        int d = 0;
        for (int len : base_.lengths()) d += len / 2;
        return d;
    }

private:
    GroupSpec base_;
    Variant variant_;
    int height_;
    BoundaryMode mode_;
    int strip_radius_;
    std::vector<Element> elements_;
    std::map<Element, int> index_;
    std::vector<std::vector<int>> adj_;
    std::vector<ByteKey> element_keys_;
};

// Deterministic lazy weight field: a keyed pseudorandom function from the
// canonical edge identity to [0,1), pushed through the quantile function.
class WeightField {
public:
    WeightField(std::uint64_t seed, DistributionSpec dist)
        : seed_mix_(splitmix64(seed ^ 0x57454947485446ULL)), dist_(dist) {}

    // Degenerate all-edges-equal field. Deliberately bypasses the atomic-law
    // rejection: only for exercising tie-break determinism in tests.
    static WeightField constant_for_tests(double c) {
        WeightField f(0, DistributionSpec::exponential(1.0));
        f.constant_ = c;
        return f;
    }

    double weight_from_hash(std::uint64_t edge_content_hash) const {
        if (constant_) return *constant_;
        std::uint64_t bits = splitmix64(seed_mix_ ^ edge_content_hash);
        return inverse_cdf(dist_, u01_from_bits(bits));
    }

    double weight(const LatticeWindow& window, const EdgeId& e) const {
        return weight_from_hash(content_hash(window.edge_bytes(e)));
    }

    const DistributionSpec& dist() const { return dist_; }

private:
    std::uint64_t seed_mix_;
    DistributionSpec dist_;
    std::optional<double> constant_;
};

}  // namespace eden
