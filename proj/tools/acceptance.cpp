// Acceptance gate: runs every release criterion and prints one PASS/FAIL
// line each. Exit code 0 iff all criteria pass.
//
// All tolerances and calibration constants are pinned here. Values marked
// "frozen" were fixed from a documented pilot run (seed 0xA11CE5EED) before
// any acceptance run and must not be tuned against acceptance output.

#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "eden/dynamics.hpp"
#include "eden/io.hpp"
#include "eden/render.hpp"
#include "eden/stats.hpp"

using namespace eden;
using Clock = std::chrono::steady_clock;

namespace {

// acceptance seed, distinct from the pilot seed by design
constexpr std::uint64_t kSeed = 0xACCE9CA7E5ULL;

constexpr double kOracleTol = 1e-12;          // criteria 1, 2
constexpr double kMeanSeCap = 0.03;           // criterion 3
constexpr double kSurvivalDecayFactor = 0.5;  // criterion 6, frozen (pilot ratio 0.29)
constexpr int kTailReplicas = 200;            // criterion 7, frozen (pilot separates at N=100)
constexpr double kVerticalBound = 0.95;       // criterion 8, frozen (pilot mean 0.31)
constexpr double kShapeDriftTol = 0.05;       // criterion 10
constexpr double kChiAlpha = 0.001;           // criterion 11

const DistributionSpec kExp1 = DistributionSpec::exponential(1.0);

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail,
            Clock::time_point t0) {
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("%s  criterion %2d: %s — %s (%.1fs)\n", pass ? "PASS" : "FAIL", criterion,
                name.c_str(), detail.c_str(), dt);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double oracle_sweep(const LatticeWindow& window, std::uint64_t seed, int seeds,
                    std::size_t budget) {
    double max_delta = 0.0;
    for (int s = 0; s < seeds; ++s) {
        WeightField field(derive_seed(seed, static_cast<std::uint64_t>(s)), kExp1);
        PassageTimeMap ptm = passage_times(window, field);
        for (int v = 0; v < window.vertex_count(); ++v) {
            const double d = brute_force_passage_time(window, field, window.vertex(v), budget);
            max_delta = std::max(max_delta, std::fabs(ptm.dist[v] - d));
        }
    }
    return max_delta;
}

void criterion_1() {
    auto t0 = Clock::now();
    double worst = 0.0;
    for (int L : {3, 4, 5, 6}) {
        LatticeWindow window(GroupSpec::cycle(L), Variant::Directed, 5, BoundaryMode::Periodic, 0);
        worst = std::max(worst, oracle_sweep(window, derive_seed(kSeed, L), 100, 1'000'000));
    }
    report(1, "directed kernel vs path enumeration", worst <= kOracleTol,
           "max |delta| = " + std::to_string(worst) + " over cycles 3..6, H=5, 100 seeds", t0);
}

void criterion_2() {
    auto t0 = Clock::now();
    double worst = 0.0;
    // 14 and 10 non-base vertices respectively
    LatticeWindow w1(GroupSpec::cycle(7), Variant::Undirected, 2, BoundaryMode::Periodic, 0);
    LatticeWindow w2(GroupSpec::cycle(5), Variant::Undirected, 2, BoundaryMode::Periodic, 0);
    worst = std::max(worst, oracle_sweep(w1, derive_seed(kSeed, 1001), 100, 30'000'000));
    worst = std::max(worst, oracle_sweep(w2, derive_seed(kSeed, 1002), 100, 30'000'000));
    report(2, "undirected kernel vs simple-path enumeration", worst <= kOracleTol,
           "max |delta| = " + std::to_string(worst) + " on two small windows, 100 seeds each", t0);
}

void criterion_3() {
    auto t0 = Clock::now();
    bool pass = true;
    std::string detail;
    for (int n : {1, 2, 4, 8}) {
        LatticeWindow window(GroupSpec::cycle(64), Variant::Directed, n, BoundaryMode::Periodic, 0);
        LevelMeanReport r = level_mean(window, kExp1, derive_seed(kSeed, 2000 + n),
                                       GroupSpec::cycle(64).identity(), n, 10'000, 1);
        const bool ok = std::fabs(r.estimate.mean - 1.0) <= 3.0 * r.estimate.se &&
                        r.estimate.se <= kMeanSeCap && r.partition_exact;
        pass = pass && ok;
        char buf[64];
        std::snprintf(buf, sizeof buf, "n=%d: %.4f(se %.4f) ", n, r.estimate.mean, r.estimate.se);
        detail += buf;
    }
    report(3, "level-size mean is one (plus exact partition audit)", pass, detail, t0);
}

void criterion_4() {
    auto t0 = Clock::now();
    bool pass = true;
    std::string detail;
    for (int m : {2, 4, 8}) {
        Estimate e = level_bound(GroupSpec::cycle(32), Variant::Undirected, BoundaryMode::Periodic,
                                 0, kExp1, derive_seed(kSeed, 3000 + m),
                                 GroupSpec::cycle(32).identity(), 8, m, 5000, 1);
        pass = pass && e.mean <= 1.0 + 3.0 * e.se;
        char buf[64];
        std::snprintf(buf, sizeof buf, "m=%d: %.4f(se %.4f) ", m, e.mean, e.se);
        detail += buf;
    }
    report(4, "restricted level-size mean at most one", pass, detail, t0);
}

void criterion_5() {
    auto t0 = Clock::now();
    const GroupSpec base = GroupSpec::cycle(16);
    long violations = 0;
    for (Variant variant : {Variant::Directed, Variant::Undirected}) {
        for (int r = 0; r < 1000; ++r) {
            WeightField field(derive_seed(derive_seed(kSeed, 4000 + (variant == Variant::Directed)),
                                          static_cast<std::uint64_t>(r)),
                              kExp1);
            // occupancy[x][n]: T^n(x) nonempty; must be downward closed in n
            std::vector<std::vector<bool>> occupancy(16, std::vector<bool>(17, false));
            for (int n = 0; n <= 16; ++n) {
                LatticeWindow window(base, variant, n, BoundaryMode::Periodic, 0);
                Forest forest = forest_from(passage_times(window, field));
                for (int b = 0; b < 16; ++b) {
                    const int root = forest.root[window.vid(b, n)];
                    if (root >= 0) occupancy[static_cast<std::size_t>(root)]
                                            [static_cast<std::size_t>(n)] = true;
                }
            }
            for (const auto& row : occupancy)
                for (int n = 1; n <= 16; ++n)
                    if (row[static_cast<std::size_t>(n)] && !row[static_cast<std::size_t>(n - 1)])
                        ++violations;
        }
    }
    report(5, "level-set survival is monotone in the level", violations == 0,
           std::to_string(violations) + " violations over 1000 replicas x 2 variants, n<=16", t0);
}

void criterion_6() {
    auto t0 = Clock::now();
    const GroupSpec base = GroupSpec::cycle(1024);
    SurvivalCurve c;
    bool monotone = true;
    try {
        c = survival_curve(base, Variant::Directed, BoundaryMode::Periodic, 0, kExp1,
                           derive_seed(kSeed, 5000), base.identity(), {8, 16, 32, 64}, 2000, 1);
    } catch (const Error&) {
        monotone = false;  // the curve hard-fails on any per-replica violation
    }
    const bool decay = monotone && c.fraction.back() <= kSurvivalDecayFactor * c.fraction.front();
    char buf[128];
    if (monotone)
        std::snprintf(buf, sizeof buf, "frac(8)=%.4f frac(64)=%.4f ratio=%.3f (frozen factor %.2f)",
                      c.fraction.front(), c.fraction.back(),
                      c.fraction.back() / c.fraction.front(), kSurvivalDecayFactor);
    else
        std::snprintf(buf, sizeof buf, "per-replica monotonicity violated");
    report(6, "tree survival decays with the level", decay, buf, t0);
}

void criterion_7() {
    auto t0 = Clock::now();
    TailReport r = tail_divergence(GroupSpec::cycle(1024), kExp1, derive_seed(kSeed, 6000),
                                   {64, 128, 256}, kTailReplicas, 1);
    const bool pass = r.width_increasing && r.height_increasing && r.width_bands_separated &&
                      r.height_bands_separated;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "capped width %.3f/%.3f/%.3f, capped 2h+1 %.2f/%.2f/%.2f (N=%d frozen)",
                  r.max_width[0].mean, r.max_width[1].mean, r.max_width[2].mean,
                  r.height_moment[0].mean, r.height_moment[1].mean, r.height_moment[2].mean,
                  kTailReplicas);
    report(7, "capped tree statistics grow with the height cap", pass, buf, t0);
}

void criterion_8() {
    auto t0 = Clock::now();
    VerticalReport r = vertical_constant(1024, kExp1, derive_seed(kSeed, 7000), {256}, 0.05, 1000, 1);
    const bool pass = r.ratio[0].mean <= kVerticalBound;
    char buf[128];
    std::snprintf(buf, sizeof buf, "mean W_256/256 = %.4f (se %.4f) <= %.2f, P[below (1-k0)n]=%.3f",
                  r.ratio[0].mean, r.ratio[0].se, kVerticalBound, r.frac_below[0]);
    report(8, "vertical passage-time ratio sits below one", pass, buf, t0);
}

void criterion_9() {
    auto t0 = Clock::now();
    const GroupSpec base = GroupSpec::cycle(16);
    LatticeWindow window(base, Variant::Undirected, 8, BoundaryMode::Periodic, 0);
    long mismatches = 0;
    for (int s = 0; s < 100; ++s) {
        WeightField field(derive_seed(derive_seed(kSeed, 8000), static_cast<std::uint64_t>(s)),
                          kExp1);
        PassageTimeMap ptm = undirected_passage_times(window, field);
        Forest forest = forest_from(ptm);
        for (double t : {0.5, 1.0, 2.0, 5.0}) {
            GrowthSet g = growth_set(ptm, forest, t);
            std::set<int> union_of_balls;
            for (int b = 0; b < window.base_size(); ++b)
                for (int v : fpp_ball(window, field, window.vertex(window.vid(b, 0)), t))
                    union_of_balls.insert(v);
            if (union_of_balls != std::set<int>(g.vids.begin(), g.vids.end())) ++mismatches;
        }
    }
    report(9, "growth set equals the union of single-source balls", mismatches == 0,
           std::to_string(mismatches) + " mismatches over 100 seeds x 4 times", t0);
}

void criterion_10() {
    auto t0 = Clock::now();
    std::vector<ShapeSummary> sums;
    for (double t : {50.0, 100.0, 200.0}) {
        const int height = static_cast<int>(3.2 * t) + 10;  // frozen sizing, ~2.4x headroom
        const int radius = static_cast<int>(3.0 * t) + 10;
        std::vector<ShapeEstimate> estimates;
        for (int s = 0; s < 20; ++s)
            estimates.push_back(shape_profile_one(
                kExp1, derive_seed(derive_seed(kSeed, 9000 + static_cast<int>(t)),
                                   static_cast<std::uint64_t>(s)),
                t, 0.8, radius, height));
        sums.push_back(summarize_shape(estimates));
    }
    const bool dev_ok = sums[1].median_max_deviation <= sums[0].median_max_deviation &&
                        sums[2].median_max_deviation <= sums[1].median_max_deviation;
    const bool drift_ok =
        std::fabs(sums[2].d_hat_mean - sums[1].d_hat_mean) <= kShapeDriftTol * sums[1].d_hat_mean;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "median max-dev %.4f/%.4f/%.4f, d-hat %.4f/%.4f/%.4f (drift tol %.0f%%)",
                  sums[0].median_max_deviation, sums[1].median_max_deviation,
                  sums[2].median_max_deviation, sums[0].d_hat_mean, sums[1].d_hat_mean,
                  sums[2].d_hat_mean, 100.0 * kShapeDriftTol);
    report(10, "growth boundary flattens as time grows", dev_ok && drift_ok, buf, t0);
}

void criterion_11() {
    auto t0 = Clock::now();
    LatticeWindow window(GroupSpec::cycle(5), Variant::Undirected, 3, BoundaryMode::Periodic, 0);

    // (a) first coupled addition is uniform over the boundary
    MemorylessnessReport first = memorylessness_test(window, kExp1, 1, 100'000,
                                                     derive_seed(kSeed, 10'000));
    const bool uniform_ok = first.steps[0].min_p_value >= kChiAlpha;

    // (b) empirical second-step edge marginal vs the exact chain enumeration
    const auto exact = exact_step_marginal(window, 2);
    std::map<std::pair<int, int>, long> counts;
    const int n = 100'000;
    for (int r = 0; r < n; ++r) {
        WeightField field(derive_seed(derive_seed(kSeed, 10'001), static_cast<std::uint64_t>(r)),
                          kExp1);
        PassageTimeMap ptm = undirected_passage_times(window, field);
        AdditionSequence seq = coupling_order(ptm, forest_from(ptm), kExp1);
        // entries 0..4 are the base layer at distance zero; step 2 is index 6
        const AdditionRecord& rec = seq[static_cast<std::size_t>(window.base_size()) + 1];
        ++counts[{rec.from_vid, rec.to_vid}];
    }
    std::vector<std::size_t> obs;
    std::vector<double> probs;
    for (const auto& [edge, p] : exact) {
        obs.push_back(counts.count(edge) ? static_cast<std::size_t>(counts[edge]) : 0);
        probs.push_back(p);
    }
    ChiSquareResult chi = chi_square_test(obs, probs);
    const bool step2_ok = chi.p_value >= kChiAlpha;

    // (c) the uniform(0,1) negative control must be rejected
    MemorylessnessReport neg = memorylessness_test(window, DistributionSpec::uniform(0.0, 1.0), 2,
                                                   100'000, derive_seed(kSeed, 10'002));
    double neg_min_p = 1.0;
    for (const StepReport& s : neg.steps) neg_min_p = std::min(neg_min_p, s.min_p_value);
    const bool control_ok = neg_min_p < kChiAlpha;

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "first-step min p=%.3g, step-2 vs enumeration p=%.3g, control min p=%.3g",
                  first.steps[0].min_p_value, chi.p_value, neg_min_p);
    report(11, "growth chain is the uniform boundary chain", uniform_ok && step2_ok && control_ok,
           buf, t0);
}

void criterion_12() {
    auto t0 = Clock::now();
    bool pass = true;

    auto csv_once = [] {
        LatticeWindow window(GroupSpec::cycle(12), Variant::Undirected, 6, BoundaryMode::Periodic,
                             0);
        WeightField field(derive_seed(kSeed, 11'000), kExp1);
        PassageTimeMap ptm = passage_times(window, field);
        return forest_csv(ptm, forest_from(ptm));
    };
    pass = pass && csv_once() == csv_once();

    auto svg_once = [] {
        LatticeWindow window(GroupSpec::cycle(12), Variant::Undirected, 6, BoundaryMode::Periodic,
                             0);
        WeightField field(derive_seed(kSeed, 11'000), kExp1);
        PassageTimeMap ptm = passage_times(window, field);
        Forest forest = forest_from(ptm);
        StyleConfig style;
        style.layer_geodesics = true;
        RenderResult img = render_forest(ptm, forest, style);
        return img.svg + img.legend_json;
    };
    pass = pass && svg_once() == svg_once();

    auto json_once = [] {
        LatticeWindow window(GroupSpec::cycle(16), Variant::Directed, 4, BoundaryMode::Periodic, 0);
        LevelMeanReport r = level_mean(window, kExp1, derive_seed(kSeed, 11'001),
                                       GroupSpec::cycle(16).identity(), 4, 200, 3);
        return estimate_report("level-mean", json{{"n", 4}}, r.estimate, "n/a", "n/a").dump() +
               ledger_csv("w_n", r.estimate.ledger);
    };
    pass = pass && json_once() == json_once();

    report(12, "identical configs give byte-identical CSV/JSON/SVG", pass,
           pass ? "all artifact pairs byte-equal (incl. multi-worker campaign)" : "byte mismatch",
           t0);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    if (g_failures == 0)
        std::printf("acceptance: all 12 criteria PASS\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
