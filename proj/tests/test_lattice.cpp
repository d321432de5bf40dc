#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "eden/lattice.hpp"

using namespace eden;

namespace {

// All edges of a window, deduplicated by canonical bytes.
std::vector<EdgeId> all_edges(const LatticeWindow& w) {
    std::vector<EdgeId> out;
    std::set<ByteKey> seen;
    for (int v = 0; v < w.vertex_count(); ++v) {
        for (const EdgeId& e : w.incident_edges(w.vertex(v))) {
            if (seen.insert(w.edge_bytes(e)).second) out.push_back(e);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("incident edges follow the two graph constructions") {
    SECTION("undirected base layer has only the vertical edge") {
        LatticeWindow w(GroupSpec::integer_lattice(1), Variant::Undirected, 3,
                        BoundaryMode::Strip, 4);
        auto edges = w.incident_edges(VertexId{Element{{0}}, 0});
        REQUIRE(edges.size() == 1);
        CHECK(edges[0].a == VertexId{Element{{0}}, 0});
        CHECK(edges[0].b == VertexId{Element{{0}}, 1});
    }
    SECTION("undirected interior vertex has full degree") {
        LatticeWindow w(GroupSpec::cycle(5), Variant::Undirected, 4, BoundaryMode::Periodic);
        auto edges = w.incident_edges(VertexId{Element{{0}}, 2});
        REQUIRE(edges.size() == 4);
        std::set<VertexId> others;
        for (const EdgeId& e : edges)
            others.insert(e.a == VertexId{Element{{0}}, 2} ? e.b : e.a);
        CHECK(others == std::set<VertexId>{VertexId{Element{{1}}, 2}, VertexId{Element{{4}}, 2},
                                           VertexId{Element{{0}}, 1}, VertexId{Element{{0}}, 3}});
    }
    SECTION("directed vertex has two downward edges") {
        LatticeWindow w(GroupSpec::integer_lattice(1), Variant::Directed, 4, BoundaryMode::Strip,
                        4);
        auto edges = w.incident_edges(VertexId{Element{{0}}, 3}, /*include_upward=*/false);
        REQUIRE(edges.size() == 2);
        for (const EdgeId& e : edges) {
            CHECK(e.a == VertexId{Element{{0}}, 3});  // upper endpoint stored first
            CHECK(e.b.level == 2);
        }
    }
    SECTION("vertex outside the window is rejected") {
        LatticeWindow w(GroupSpec::integer_lattice(1), Variant::Undirected, 3,
                        BoundaryMode::Strip, 4);
        CHECK_THROWS_AS(w.incident_edges(VertexId{Element{{9}}, 0}), Error);
        CHECK_THROWS_AS(w.incident_edges(VertexId{Element{{0}}, 7}), Error);
    }
}

TEST_CASE("edge enumeration is involution-consistent") {
    for (Variant variant : {Variant::Directed, Variant::Undirected}) {
        LatticeWindow w(GroupSpec::cycle(6), variant, 4, BoundaryMode::Periodic);
        for (const EdgeId& e : all_edges(w)) {
            auto at_a = w.incident_edges(e.a);
            auto at_b = w.incident_edges(e.b);
            CHECK(std::count(at_a.begin(), at_a.end(), e) == 1);
            CHECK(std::count(at_b.begin(), at_b.end(), e) == 1);
        }
    }
}

TEST_CASE("periodic windows are translation-closed") {
    LatticeWindow w(GroupSpec::cycle(7), Variant::Undirected, 3, BoundaryMode::Periodic);
    auto shift = [](const VertexId& v) {
        return VertexId{Element{{(v.element.data[0] + 1) % 7}}, v.level};
    };
    std::set<ByteKey> bytes;
    auto edges = all_edges(w);
    for (const EdgeId& e : edges) bytes.insert(w.edge_bytes(e));
    for (const EdgeId& e : edges)
        CHECK(bytes.count(w.edge_bytes(w.make_edge(shift(e.a), shift(e.b)))) == 1);
}

TEST_CASE("inverse quantile functions") {
    auto exp1 = DistributionSpec::exponential(1.0);
    CHECK(inverse_cdf(exp1, 0.0) == 0.0);
    CHECK_THAT(inverse_cdf(exp1, 1.0 - std::exp(-1.0)),
               Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK(inverse_cdf(DistributionSpec::uniform(0.0, 1.0), 0.3) == 0.3);
    CHECK_THROWS_AS(inverse_cdf(exp1, 1.0), Error);
    CHECK_THROWS_AS(inverse_cdf(exp1, -0.1), Error);
    // round trip through the cdf
    auto wb = DistributionSpec::weibull(1.7, 0.8);
    for (double u : {0.05, 0.3, 0.62, 0.999})
        for (const auto& d : {exp1, DistributionSpec::uniform(0.5, 2.0), wb})
            CHECK_THAT(d.cdf(inverse_cdf(d, u)), Catch::Matchers::WithinAbs(u, 1e-10));
}

TEST_CASE("distribution config validation") {
    CHECK_THROWS_AS(DistributionSpec::exponential(0.0), Error);
    CHECK_THROWS_AS(DistributionSpec::uniform(1.0, 1.0), Error);
    CHECK_THROWS_AS(DistributionSpec::uniform(-0.5, 1.0), Error);
    CHECK_THROWS_AS(DistributionSpec::weibull(0.0, 1.0), Error);
    CHECK_THAT(DistributionSpec::exponential(2.0).mean(), Catch::Matchers::WithinAbs(0.5, 1e-15));
    CHECK_THAT(DistributionSpec::uniform(0.0, 3.0).mean(), Catch::Matchers::WithinAbs(1.5, 1e-15));
}

TEST_CASE("weight field is deterministic and orientation-blind") {
    LatticeWindow w(GroupSpec::cycle(6), Variant::Undirected, 4, BoundaryMode::Periodic);
    WeightField field(42, DistributionSpec::exponential(1.0));
    VertexId u{Element{{2}}, 2}, v{Element{{3}}, 2};
    CHECK(field.weight(w, w.make_edge(u, v)) == field.weight(w, w.make_edge(v, u)));
    // raw (unordered) pairs canonicalize inside edge_bytes too
    CHECK(w.edge_bytes(EdgeId{u, v}) == w.edge_bytes(EdgeId{v, u}));
    WeightField again(42, DistributionSpec::exponential(1.0));
    CHECK(field.weight(w, w.make_edge(u, v)) == again.weight(w, w.make_edge(u, v)));
    WeightField other(43, DistributionSpec::exponential(1.0));
    CHECK(field.weight(w, w.make_edge(u, v)) != other.weight(w, w.make_edge(u, v)));
}

TEST_CASE("edges keep their weights when the window grows") {
    WeightField field(7, DistributionSpec::exponential(1.0));
    LatticeWindow small(GroupSpec::integer_lattice(1), Variant::Undirected, 4,
                        BoundaryMode::Strip, 4);
    LatticeWindow big(GroupSpec::integer_lattice(1), Variant::Undirected, 9, BoundaryMode::Strip,
                      8);
    for (const EdgeId& e : all_edges(small))
        CHECK(field.weight(small, e) == field.weight(big, e));
}

TEST_CASE("fast edge hash equals the canonical byte hash") {
    for (Variant variant : {Variant::Directed, Variant::Undirected}) {
        LatticeWindow w(GroupSpec::torus({5, 4}), variant, 3, BoundaryMode::Periodic);
        for (const EdgeId& e : all_edges(w)) {
            const std::uint64_t slow = content_hash(w.edge_bytes(e));
            const int ba = w.base_index(e.a.element), bb = w.base_index(e.b.element);
            std::uint64_t fast;
            if (e.a.level == e.b.level)
                fast = w.horizontal_edge_hash(ba, bb, e.a.level);
            else if (e.a.level < e.b.level)
                fast = w.edge_hash(ba, e.a.level, bb, e.b.level);
            else
                fast = w.edge_hash(bb, e.b.level, ba, e.a.level);
            CHECK(fast == slow);
        }
    }
}

TEST_CASE("edge byte encodings are collision-free within a window") {
    for (Variant variant : {Variant::Directed, Variant::Undirected}) {
        LatticeWindow w(GroupSpec::torus({6, 6}), variant, 8, BoundaryMode::Periodic);
        std::set<ByteKey> seen;
        std::size_t count = 0;
        for (int v = 0; v < w.vertex_count(); ++v) {
            for (const EdgeId& e : w.incident_edges(w.vertex(v), /*include_upward=*/false)) {
                if (variant == Variant::Undirected && e.a.level == e.b.level &&
                    !(w.vertex(v) == e.a))
                    continue;  // count each horizontal edge once
                seen.insert(w.edge_bytes(e));
                ++count;
            }
        }
        CHECK(seen.size() == count);
    }
}

TEST_CASE("weight sample matches the law") {
    // ~100k distinct edges of a wide shallow strip
    LatticeWindow w(GroupSpec::integer_lattice(1), Variant::Undirected, 1, BoundaryMode::Strip,
                    25000);
    auto edges = all_edges(w);
    REQUIRE(edges.size() >= 100000);

    for (const auto& dist :
         {DistributionSpec::exponential(1.0), DistributionSpec::uniform(0.0, 2.0)}) {
        WeightField field(99, dist);
        std::vector<double> u;
        double sum = 0.0, sq = 0.0;
        for (const EdgeId& e : edges) {
            const double x = field.weight(w, e);
            REQUIRE(x >= 0.0);
            sum += x;
            sq += x * x;
            u.push_back(dist.cdf(x));
        }
        const double n = static_cast<double>(edges.size());
        const double mean = sum / n;
        const double sd = std::sqrt((sq - n * mean * mean) / (n - 1));
        CHECK(std::fabs(mean - dist.mean()) <= 3.0 * sd / std::sqrt(n));

        // Kolmogorov-Smirnov against uniformity of the probability transform,
        // significance 0.001
        std::sort(u.begin(), u.end());
        double d_stat = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double lo = static_cast<double>(i) / n;
            const double hi = static_cast<double>(i + 1) / n;
            d_stat = std::max({d_stat, std::fabs(u[i] - lo), std::fabs(u[i] - hi)});
        }
        CHECK(d_stat <= 1.9495 / std::sqrt(n));
    }
}

TEST_CASE("window construction validation") {
    CHECK_THROWS_AS(LatticeWindow(GroupSpec::integer_lattice(1), Variant::Directed, 3,
                                  BoundaryMode::Periodic),
                    Error);
    CHECK_THROWS_AS(
        LatticeWindow(GroupSpec::cycle(5), Variant::Directed, -1, BoundaryMode::Periodic), Error);
    CHECK_THROWS_AS(LatticeWindow(GroupSpec::integer_lattice(2), Variant::Directed, 10,
                                  BoundaryMode::Strip, 100, /*vertex_budget=*/1000),
                    Error);
}
