#include <catch2/catch_amalgamated.hpp>

#include "eden/stats.hpp"

using namespace eden;

namespace {
const DistributionSpec kExp1 = DistributionSpec::exponential(1.0);
}

TEST_CASE("replica runner is bit-stable across worker counts") {
    auto fn = [](int r) { return std::sin(static_cast<double>(r)) * 1e6; };
    auto a = run_replicas(97, 1, fn);
    auto b = run_replicas(97, 3, fn);
    auto c = run_replicas(97, 8, fn);
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("summarize computes mean and standard error") {
    Estimate e = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK_THAT(e.mean, Catch::Matchers::WithinAbs(2.5, 1e-15));
    // stddev of {1..4} = sqrt(5/3); SE = that / 2
    CHECK_THAT(e.se, Catch::Matchers::WithinAbs(std::sqrt(5.0 / 3.0) / 2.0, 1e-12));
    CHECK(e.n == 4);
    CHECK(summarize({}).n == 0);
}

TEST_CASE("level mean estimate centers on one") {
    LatticeWindow w(GroupSpec::cycle(16), Variant::Directed, 4, BoundaryMode::Periodic);
    LevelMeanReport r = level_mean(w, kExp1, 101, Element{{0}}, 3, 600);
    CHECK(r.partition_exact);
    CHECK(r.partition_target == 16);
    CHECK(std::fabs(r.estimate.mean - 1.0) <= 3.0 * r.estimate.se);
    CHECK_FALSE(r.estimate.bias_warning);

    SECTION("level zero is deterministic") {
        LevelMeanReport r0 = level_mean(w, kExp1, 101, Element{{0}}, 0, 50);
        CHECK(r0.estimate.mean == 1.0);
        CHECK(r0.estimate.se == 0.0);
    }
    SECTION("campaign determinism") {
        LevelMeanReport again = level_mean(w, kExp1, 101, Element{{0}}, 3, 600);
        CHECK(again.estimate.ledger == r.estimate.ledger);
        LevelMeanReport parallel = level_mean(w, kExp1, 101, Element{{0}}, 3, 600, /*workers=*/4);
        CHECK(parallel.estimate.ledger == r.estimate.ledger);
    }
    SECTION("validation") {
        CHECK_THROWS_AS(level_mean(w, kExp1, 1, Element{{0}}, 9, 10), Error);
        LatticeWindow wu(GroupSpec::cycle(16), Variant::Undirected, 4, BoundaryMode::Periodic);
        CHECK_THROWS_AS(level_mean(wu, kExp1, 1, Element{{0}}, 2, 10), Error);
    }
}

TEST_CASE("restricted level-count estimate stays within the unit bound") {
    for (Variant variant : {Variant::Directed, Variant::Undirected}) {
        Estimate e = level_bound(GroupSpec::cycle(12), variant, BoundaryMode::Periodic, 0, kExp1,
                                 303, Element{{0}}, 4, 4, 500);
        CHECK(e.mean <= 1.0 + 3.0 * e.se);
    }
    SECTION("m = 0 is the root itself") {
        Estimate e = level_bound(GroupSpec::cycle(12), Variant::Undirected,
                                 BoundaryMode::Periodic, 0, kExp1, 1, Element{{0}}, 3, 0, 40);
        CHECK(e.mean == 1.0);
        CHECK(e.se == 0.0);
    }
    SECTION("m > n is rejected") {
        CHECK_THROWS_AS(level_bound(GroupSpec::cycle(12), Variant::Undirected,
                                    BoundaryMode::Periodic, 0, kExp1, 1, Element{{0}}, 2, 3, 10),
                        Error);
    }
}

TEST_CASE("survival curves") {
    for (Variant variant : {Variant::Directed, Variant::Undirected}) {
        SurvivalCurve c = survival_curve(GroupSpec::cycle(32), variant, BoundaryMode::Periodic, 0,
                                         kExp1, 404, Element{{0}}, {0, 1, 2, 4, 8}, 300);
        REQUIRE(c.levels.size() == 5);
        CHECK(c.fraction[0] == 1.0);  // level 0 always survives
        for (std::size_t i = 1; i < c.fraction.size(); ++i)
            CHECK(c.fraction[i] <= c.fraction[i - 1]);
        for (double f : c.fraction) CHECK((f >= 0.0 && f <= 1.0));
    }
}

TEST_CASE("tail statistics grow with the height cap") {
    TailReport r = tail_divergence(GroupSpec::integer_lattice(1), kExp1, 505,
                                   {2, 4, 8}, 400);
    REQUIRE(r.max_width.size() == 3);
    CHECK(r.width_increasing);
    CHECK(r.height_increasing);
    // phi_Z(h) = 2h + 1: means must be odd-integer combinations >= 1
    for (const Estimate& e : r.height_moment) CHECK(e.mean >= 1.0);
    for (const Estimate& e : r.max_width) CHECK(e.mean >= 1.0);
}

TEST_CASE("vertical passage-time ratios") {
    SECTION("constant weights give ratio exactly c") {
        WeightField constant = WeightField::constant_for_tests(0.25);
        VerticalReport r =
            vertical_constant(40, kExp1, 1, {4, 8, 16}, 0.05, 10, 1, &constant);
        for (const Estimate& e : r.ratio) {
            CHECK(e.mean == 0.25);
            CHECK(e.se == 0.0);
        }
    }
    SECTION("exponential weights sit well below the per-edge mean") {
        VerticalReport r = vertical_constant(40, kExp1, 606, {8, 16}, 0.05, 300);
        for (const Estimate& e : r.ratio) CHECK(e.mean < 0.95);
        // subadditivity diagnostic: non-increasing within 3 SE
        for (std::size_t i = 1; i < r.ratio.size(); ++i)
            CHECK(r.ratio[i].mean <= r.ratio[i - 1].mean + 3.0 * (r.ratio[i].se + r.ratio[i - 1].se));
    }
    SECTION("cone violation is rejected") {
        CHECK_THROWS_AS(vertical_constant(16, kExp1, 1, {8, 16}, 0.05, 10), Error);
    }
}

TEST_CASE("shape profiles") {
    SECTION("tiny t: the boundary is the base layer, profile flat zero") {
        ShapeEstimate e = shape_profile_one(kExp1, 9, 1e-9, 0.5, 6, 6);
        CHECK(e.d_hat == 0.0);
        CHECK(e.max_deviation == 0.0);
        for (double v : e.profile) CHECK(v == 0.0);
    }
    SECTION("moderate t: sane profile and determinism") {
        ShapeEstimate e = shape_profile_one(kExp1, 42, 8.0, 0.8, 30, 36);
        REQUIRE(!e.profile.empty());
        double lo = e.profile[0], hi = e.profile[0];
        for (double v : e.profile) {
            CHECK(v >= 0.0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK((e.d_hat >= lo && e.d_hat <= hi));
        ShapeEstimate again = shape_profile_one(kExp1, 42, 8.0, 0.8, 30, 36);
        CHECK(again.profile == e.profile);
        CHECK(again.d_hat == e.d_hat);
    }
    SECTION("cap violation raises") {
        CHECK_THROWS_AS(shape_profile_one(kExp1, 42, 8.0, 0.8, 30, 3), Error);
    }
    SECTION("summary over seeds") {
        std::vector<ShapeEstimate> es;
        for (std::uint64_t s : {1, 2, 3, 4, 5})
            es.push_back(shape_profile_one(kExp1, s, 6.0, 0.8, 24, 30));
        ShapeSummary sum = summarize_shape(es);
        CHECK(sum.seeds == 5);
        CHECK(sum.time == 6.0);
        CHECK(sum.median_max_deviation >= 0.0);
    }
}

TEST_CASE("mass transport audit balances exactly") {
    for (Variant variant : {Variant::Directed, Variant::Undirected}) {
        MassTransportReport r =
            mass_transport_audit(GroupSpec::cycle(12), variant, kExp1, 707, 4, 3, 50);
        CHECK(r.all_exact);
        for (std::size_t i = 0; i < r.sent.size(); ++i) {
            CHECK(r.sent[i] == r.received[i]);
            CHECK(r.sent[i] == 12);  // periodic windows reach every level-m vertex
        }
    }
    CHECK_THROWS_AS(mass_transport_audit(GroupSpec::integer_lattice(1), Variant::Directed, kExp1,
                                         1, 4, 2, 5),
                    Error);
}
