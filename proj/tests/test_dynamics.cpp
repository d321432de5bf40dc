#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "eden/dynamics.hpp"

using namespace eden;

namespace {
const DistributionSpec kExp1 = DistributionSpec::exponential(1.0);
}

TEST_CASE("initial state: base occupied, boundary is the vertical fringe") {
    LatticeWindow w(GroupSpec::cycle(5), Variant::Undirected, 3, BoundaryMode::Periodic);
    EdenState state(w);
    for (int b = 0; b < w.base_size(); ++b) {
        CHECK(state.occupied(b));
        CHECK(state.root(b) == b);
    }
    const auto& boundary = state.boundary();
    REQUIRE(boundary.size() == 5);
    for (int b = 0; b < 5; ++b) {
        CHECK(boundary[static_cast<std::size_t>(b)].from == b);
        CHECK(boundary[static_cast<std::size_t>(b)].to == w.vid(b, 1));
    }
}

TEST_CASE("incremental boundary equals the full recomputation") {
    for (Variant variant : {Variant::Undirected, Variant::Directed}) {
        LatticeWindow w(GroupSpec::cycle(5), variant, 4, BoundaryMode::Periodic);
        EdenState state(w);
        RngStream rng(2024);
        for (int step = 0; step < 12; ++step) {
            AdditionRecord rec = eden_step(state, rng);
            CHECK(state.occupied(rec.to_vid));
            CHECK(rec.root == state.root(rec.from_vid));
            auto incremental = state.boundary();
            std::sort(incremental.begin(), incremental.end());
            CHECK(incremental == state.compute_boundary());
        }
    }
}

TEST_CASE("saturated window raises") {
    LatticeWindow w(GroupSpec::cycle(3), Variant::Undirected, 1, BoundaryMode::Periodic);
    EdenState state(w);
    RngStream rng(1);
    for (int i = 0; i < 3; ++i) eden_step(state, rng);  // fill level 1
    CHECK_THROWS_AS(eden_step(state, rng), Error);
    try {
        eden_step(state, rng);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::saturated);
    }
}

TEST_CASE("root labels partition the occupied set into base-rooted trees") {
    LatticeWindow w(GroupSpec::cycle(8), Variant::Undirected, 6, BoundaryMode::Periodic);
    EdenState state(w);
    RngStream rng(777);
    for (int step = 0; step < 40; ++step) eden_step(state, rng);
    for (int v = 0; v < w.vertex_count(); ++v) {
        if (!state.occupied(v)) continue;
        const int r = state.root(v);
        CHECK((r >= 0 && r < w.base_size()));
        if (w.vid_level(v) == 0) CHECK(r == v);
        // connected to the root through same-rooted occupied vertices
        std::set<int> seen{v};
        std::vector<int> frontier{v};
        bool reached = w.vid_level(v) == 0;
        while (!frontier.empty() && !reached) {
            int u = frontier.back();
            frontier.pop_back();
            for (int n : w.adjacent_vids(u)) {
                if (seen.count(n) || !state.occupied(n) || state.root(n) != r) continue;
                if (n == r) reached = true;
                seen.insert(n);
                frontier.push_back(n);
            }
        }
        CHECK(reached);
    }
}

TEST_CASE("coupling order: sorted, base first, exponential only") {
    LatticeWindow w(GroupSpec::cycle(6), Variant::Undirected, 4, BoundaryMode::Periodic);
    WeightField field(5, kExp1);
    PassageTimeMap ptm = undirected_passage_times(w, field);
    Forest forest = forest_from(ptm);
    AdditionSequence seq = coupling_order(ptm, forest, kExp1);
    REQUIRE(seq.size() == static_cast<std::size_t>(w.vertex_count()));
    for (int b = 0; b < w.base_size(); ++b) {
        CHECK(seq[static_cast<std::size_t>(b)].time == 0.0);
        CHECK(seq[static_cast<std::size_t>(b)].from_vid == -1);
    }
    for (std::size_t i = static_cast<std::size_t>(w.base_size()) + 1; i < seq.size(); ++i)
        CHECK(seq[i].time > seq[i - 1].time);  // strict: a tie would have thrown
    for (const AdditionRecord& rec : seq)
        if (rec.from_vid >= 0) CHECK(rec.root == forest.root[rec.from_vid]);

    CHECK_THROWS_AS(coupling_order(ptm, forest, DistributionSpec::uniform(0.0, 1.0)), Error);
    try {
        coupling_order(ptm, forest, DistributionSpec::uniform(0.0, 1.0));
    } catch (const Error& e) {
        CHECK(e.code() == Errc::coupling_invalid);
    }
}

TEST_CASE("first coupled addition is uniform over the vertical fringe") {
    // cycle(5), H=3: the first added edge under exponential FPP should be
    // uniform over the 5 base verticals (chi-square at 0.001)
    LatticeWindow w(GroupSpec::cycle(5), Variant::Undirected, 3, BoundaryMode::Periodic);
    const int n = 100000;
    std::map<std::pair<int, int>, std::size_t> counts;
    for (int r = 0; r < n; ++r) {
        WeightField field(derive_seed(31337, static_cast<std::uint64_t>(r)), kExp1);
        PassageTimeMap ptm = undirected_passage_times(w, field);
        int best = -1;
        for (int v = w.base_size(); v < w.vertex_count(); ++v)
            if (best < 0 || ptm.dist[v] < ptm.dist[best]) best = v;
        ++counts[{ptm.pred[best], best}];
    }
    REQUIRE(counts.size() == 5);
    std::vector<std::size_t> observed;
    for (int b = 0; b < 5; ++b) {
        auto it = counts.find({b, w.vid(b, 1)});
        REQUIRE(it != counts.end());
        observed.push_back(it->second);
    }
    ChiSquareResult chi = chi_square_test(observed, std::vector<double>(5, 0.2));
    CHECK(chi.p_value > 0.001);
}

TEST_CASE("exact chain enumeration: marginals sum to one and respect symmetry") {
    LatticeWindow w(GroupSpec::cycle(3), Variant::Undirected, 2, BoundaryMode::Periodic);
    for (int k : {1, 2, 3}) {
        auto marginal = exact_step_marginal(w, k);
        double total = 0.0;
        for (const auto& [edge, p] : marginal) total += p;
        CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
    auto first = exact_step_marginal(w, 1);
    REQUIRE(first.size() == 3);
    for (const auto& [edge, p] : first) CHECK_THAT(p, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
}

TEST_CASE("two-step Eden chain matches the exact enumeration") {
    LatticeWindow w(GroupSpec::cycle(3), Variant::Undirected, 2, BoundaryMode::Periodic);
    auto marginal = exact_step_marginal(w, 2);
    const int n = 100000;
    std::map<std::pair<int, int>, std::size_t> counts;
    RngStream rng(90210);
    for (int r = 0; r < n; ++r) {
        EdenState state(w);
        eden_step(state, rng);
        AdditionRecord rec = eden_step(state, rng);
        ++counts[{rec.from_vid, rec.to_vid}];
    }
    // per-outcome guard (loose, joint across ~12 outcomes) plus an
    // aggregate chi-square at 0.001
    std::vector<std::size_t> observed;
    std::vector<double> probs;
    for (const auto& [edge, p] : marginal) {
        const double obs = static_cast<double>(counts[edge]) / n;
        const double se = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::fabs(obs - p) <= 4.0 * se);
        observed.push_back(counts[edge]);
        probs.push_back(p);
    }
    CHECK(chi_square_test(observed, probs).p_value > 0.001);
    // no probability mass outside the enumerated support
    for (const auto& [edge, c] : counts) CHECK(marginal.count(edge) == 1);
}

TEST_CASE("coupled FPP two-step marginal matches the exact chain") {
    LatticeWindow w(GroupSpec::cycle(3), Variant::Undirected, 2, BoundaryMode::Periodic);
    auto marginal = exact_step_marginal(w, 2);
    const int n = 50000;
    std::map<std::pair<int, int>, std::size_t> counts;
    for (int r = 0; r < n; ++r) {
        WeightField field(derive_seed(5150, static_cast<std::uint64_t>(r)), kExp1);
        PassageTimeMap ptm = undirected_passage_times(w, field);
        Forest forest = forest_from(ptm);
        AdditionSequence seq = coupling_order(ptm, forest, kExp1);
        const AdditionRecord& rec = seq[static_cast<std::size_t>(w.base_size()) + 1];
        ++counts[{rec.from_vid, rec.to_vid}];
    }
    for (const auto& [edge, p] : marginal) {
        const double observed = static_cast<double>(counts[edge]) / n;
        const double se = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::fabs(observed - p) <= 3.5 * se);
    }
    for (const auto& [edge, c] : counts) CHECK(marginal.count(edge) == 1);
}

TEST_CASE("memorylessness test accepts exponential weights") {
    LatticeWindow w(GroupSpec::cycle(4), Variant::Undirected, 3, BoundaryMode::Periodic);
    MemorylessnessReport report = memorylessness_test(w, kExp1, 3, 4000, 11);
    REQUIRE(report.steps.size() == 3);
    // step 1: single class, uniform over 4 verticals
    REQUIRE(report.steps[0].classes.size() == 1);
    CHECK(report.steps[0].classes[0].boundary_size == 4);
    for (const StepReport& sr : report.steps) {
        CHECK(!sr.classes.empty());
        for (const StepClassResult& cls : sr.classes) CHECK(cls.chi.p_value > 0.0001);
    }
}

TEST_CASE("memorylessness test rejects a strongly non-memoryless law") {
    // near-constant weights: all base verticals fire before any fresh edge,
    // so conditional steps are grossly non-uniform
    LatticeWindow w(GroupSpec::cycle(4), Variant::Undirected, 3, BoundaryMode::Periodic);
    auto dist = DistributionSpec::uniform(0.9, 1.0);
    MemorylessnessReport report = memorylessness_test(w, dist, 3, 2000, 29);
    double min_p = 1.0;
    for (const StepReport& sr : report.steps) min_p = std::min(min_p, sr.min_p_value);
    CHECK(min_p < 1e-6);
}

TEST_CASE("memorylessness test validates its arguments") {
    LatticeWindow w(GroupSpec::cycle(4), Variant::Undirected, 3, BoundaryMode::Periodic);
    CHECK_THROWS_AS(memorylessness_test(w, kExp1, 0, 100, 1), Error);
    CHECK_THROWS_AS(memorylessness_test(w, kExp1, 6, 100, 1), Error);
}
