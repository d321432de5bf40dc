#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "eden/fpp.hpp"

namespace eden {

struct Estimate {
    double mean = 0.0;
    double se = 0.0;  // sample stddev / sqrt(N)
    std::size_t n = 0;
    std::vector<double> ledger;  // per-replica values in replica-index order
    bool bias_warning = false;   // attached for free-strip windows
};

inline Estimate summarize(std::vector<double> ledger) {
    Estimate e;
    e.n = ledger.size();
    if (e.n == 0) return e;
    double sum = 0.0;
    for (double v : ledger) sum += v;
    e.mean = sum / static_cast<double>(e.n);
    if (e.n >= 2) {
        double ss = 0.0;
        for (double v : ledger) ss += (v - e.mean) * (v - e.mean);
        e.se = std::sqrt(ss / static_cast<double>(e.n - 1)) / std::sqrt(static_cast<double>(e.n));
    }
    e.ledger = std::move(ledger);
    return e;
}

// Runs fn(replica_index) over [0, n); results land in index order so the
// aggregate is bit-stable regardless of worker count.
template <typename F>
std::vector<double> run_replicas(int n, int workers, F&& fn) {
    std::vector<double> out(static_cast<std::size_t>(n));
    workers = std::max(1, workers);
    if (workers == 1) {
        for (int r = 0; r < n; ++r) out[static_cast<std::size_t>(r)] = fn(r);
        return out;
    }
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int r = w; r < n; r += workers) out[static_cast<std::size_t>(r)] = fn(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

struct LevelMeanReport {
    Estimate estimate;                 // E[w_n(T(x))]
    bool partition_exact = true;       // per replica: sum_x w_n == base size
    std::int64_t partition_target = 0; // the base size
    int level = 0;
};

// Monte Carlo estimate of the n-th level size of the tree rooted at x,
// plus the deterministic per-replica partition audit.
inline LevelMeanReport level_mean(const LatticeWindow& window, const DistributionSpec& dist,
                                  std::uint64_t seed, const Element& x, int n, int replicas,
                                  int workers = 1) {
    if (window.variant() != Variant::Directed)
        fail(Errc::variant_mismatch, "level_mean runs on the directed variant");
    if (n > window.height()) fail(Errc::out_of_window, "level beyond window height");
    const int xb = window.base_index(x);
    if (xb < 0) fail(Errc::out_of_window, "base vertex outside window");
    LevelMeanReport report;
    report.level = n;
    report.partition_target = window.base_size();
    std::atomic<bool> partition_ok{true};
    auto ledger = run_replicas(replicas, workers, [&](int r) {
        WeightField field(derive_seed(seed, static_cast<std::uint64_t>(r)), dist);
        PassageTimeMap ptm = directed_passage_times(window, field);
        Forest forest = forest_from(ptm);
        std::int64_t wn = 0, rooted = 0;
        for (int b = 0; b < window.base_size(); ++b) {
            const int v = window.vid(b, n);
            if (forest.root[v] == xb) ++wn;
            if (forest.root[v] >= 0) ++rooted;
        }
        if (rooted != window.base_size()) partition_ok = false;
        return static_cast<double>(wn);
    });
    report.estimate = summarize(std::move(ledger));
    report.estimate.bias_warning = window.mode() == BoundaryMode::Strip;
    report.partition_exact = partition_ok;
    return report;
}

// Estimate of E[|T_{Lambda_n}(x) cap G_m|]: the forest of the height-n
// restricted metric, counted at level m.
inline Estimate level_bound(const GroupSpec& base, Variant variant, BoundaryMode mode,
                            int strip_radius, const DistributionSpec& dist, std::uint64_t seed,
                            const Element& x, int n, int m, int replicas, int workers = 1) {
    if (m > n) fail(Errc::domain_error, "level_bound requires m <= n");
    LatticeWindow window(base, variant, n, mode, strip_radius);
    const int xb = window.base_index(x);
    if (xb < 0) fail(Errc::out_of_window, "base vertex outside window");
    auto ledger = run_replicas(replicas, workers, [&](int r) {
        WeightField field(derive_seed(seed, static_cast<std::uint64_t>(r)), dist);
        PassageTimeMap ptm = passage_times(window, field);
        Forest forest = forest_from(ptm);
        std::int64_t count = 0;
        for (int b = 0; b < window.base_size(); ++b)
            if (forest.root[window.vid(b, m)] == xb) ++count;
        return static_cast<double>(count);
    });
    Estimate est = summarize(std::move(ledger));
    est.bias_warning = mode == BoundaryMode::Strip;
    return est;
}

struct SurvivalCurve {
    std::vector<int> levels;
    std::vector<double> fraction;  // P[T^n(x) != empty]
    std::vector<double> se;
    std::size_t replicas = 0;
};

// Per-level survival fractions. Monotonicity of the per-replica indicator
// is a hard invariant: a violation is a model bug, not a statistics issue.
inline SurvivalCurve survival_curve(const GroupSpec& base, Variant variant, BoundaryMode mode,
                                    int strip_radius, const DistributionSpec& dist,
                                    std::uint64_t seed, const Element& x, std::vector<int> levels,
                                    int replicas, int workers = 1) {
    std::sort(levels.begin(), levels.end());
    const int max_level = levels.empty() ? 0 : levels.back();
    SurvivalCurve curve;
    curve.levels = levels;
    curve.replicas = static_cast<std::size_t>(replicas);

    std::vector<std::vector<char>> alive(static_cast<std::size_t>(replicas));
    // The directed metric restricted to the first n levels coincides with
    // the unrestricted one there, so a single tall window serves all n.
    // The undirected T^n needs the height-n restricted metric per level.
    if (variant == Variant::Directed) {
        LatticeWindow window(base, variant, max_level, mode, strip_radius);
        const int xb = window.base_index(x);
        if (xb < 0) fail(Errc::out_of_window, "base vertex outside window");
        run_replicas(replicas, workers, [&](int r) {
            WeightField field(derive_seed(seed, static_cast<std::uint64_t>(r)), dist);
            Forest forest = forest_from(directed_passage_times(window, field));
            auto& row = alive[static_cast<std::size_t>(r)];
            row.resize(levels.size());
            for (std::size_t i = 0; i < levels.size(); ++i) {
                bool any = false;
                for (int b = 0; b < window.base_size() && !any; ++b)
                    any = forest.root[window.vid(b, levels[i])] == xb;
                row[i] = any;
            }
            return 0.0;
        });
    } else {
        std::vector<LatticeWindow> windows;
        windows.reserve(levels.size());
        for (int n : levels) windows.emplace_back(base, variant, n, mode, strip_radius);
        const int xb = windows.front().base_index(x);
        if (xb < 0) fail(Errc::out_of_window, "base vertex outside window");
        run_replicas(replicas, workers, [&](int r) {
            WeightField field(derive_seed(seed, static_cast<std::uint64_t>(r)), dist);
            auto& row = alive[static_cast<std::size_t>(r)];
            row.resize(levels.size());
            for (std::size_t i = 0; i < levels.size(); ++i) {
                const LatticeWindow& win = windows[i];
                Forest forest = forest_from(undirected_passage_times(win, field));
                bool any = false;
                for (int b = 0; b < win.base_size() && !any; ++b)
                    any = forest.root[win.vid(b, levels[i])] == xb;
                row[i] = any;
            }
            return 0.0;
        });
    }
    for (const auto& row : alive)
        for (std::size_t i = 1; i < row.size(); ++i)
            if (row[i] && !row[i - 1])
                fail(Errc::model_bug, "survival indicator increased with the level");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        std::size_t hits = 0;
        for (const auto& row : alive) hits += row[i];
        const double p = static_cast<double>(hits) / static_cast<double>(replicas);
        curve.fraction.push_back(p);
        curve.se.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(replicas)));
    }
    return curve;
}

struct TailReport {
    std::vector<int> caps;
    std::vector<Estimate> max_width;     // capped w(T(x))
    std::vector<Estimate> height_moment; // phi_G(h(T(x)))
    bool width_increasing = false;
    bool height_increasing = false;
    bool width_bands_separated = false;   // non-overlapping 1-SE bands
    bool height_bands_separated = false;
};

// Capped means of the divergent tree statistics across increasing window
// heights. Statistic growth across caps is the desk-scale signature of the
// infinite expectations. The per-replica sample averages the statistic over
// many roots at once (all of them for periodic windows, the wall-free central
// ones for strips): every root has the same marginal law by stationarity and
// the averaging cuts the heavy-tailed replica variance by orders of magnitude.
inline TailReport tail_divergence(const GroupSpec& base, const DistributionSpec& dist,
                                  std::uint64_t seed, std::vector<int> caps, int replicas,
                                  int workers = 1) {
    std::sort(caps.begin(), caps.end());
    const bool periodic =
        base.kind() == GroupSpec::Kind::Cycle || base.kind() == GroupSpec::Kind::Torus;
    if (periodic)
        for (int len : base.lengths())
            if (len <= 2 * caps.back())
                fail(Errc::cap_violation, "periodic base too small for the tallest cap");
    TailReport report;
    report.caps = caps;
    for (int cap : caps) {
        // For strips, a root needs 3*cap of clearance for its tree and the
        // cone of dependence of every member to avoid the wall entirely.
        LatticeWindow window = periodic
                                   ? LatticeWindow(base, Variant::Directed, cap,
                                                   BoundaryMode::Periodic, 0)
                                   : LatticeWindow(base, Variant::Directed, cap,
                                                   BoundaryMode::Strip, 3 * cap);
        std::vector<int> roots;
        for (int b = 0; b < window.base_size(); ++b)
            if (periodic || base.base_distance(window.base_elements()[static_cast<std::size_t>(b)],
                                               base.identity()) <= cap)
                roots.push_back(b);

        std::vector<double> widths(static_cast<std::size_t>(replicas));
        auto phis = run_replicas(replicas, workers, [&](int r) {
            WeightField field(derive_seed(seed, static_cast<std::uint64_t>(r)), dist);
            Forest forest = forest_from(directed_passage_times(window, field));
            // per-root per-level occupancy in one pass over the window
            std::vector<int> count(static_cast<std::size_t>(window.base_size()) *
                                   static_cast<std::size_t>(cap + 1));
            for (int v = 0; v < window.vertex_count(); ++v)
                if (forest.root[v] >= 0)
                    ++count[static_cast<std::size_t>(forest.root[v]) *
                                static_cast<std::size_t>(cap + 1) +
                            static_cast<std::size_t>(window.vid_level(v))];
            double width_sum = 0.0, phi_sum = 0.0;
            for (int b : roots) {
                int w = 0, h = 0;
                for (int lvl = 0; lvl <= cap; ++lvl) {
                    const int c = count[static_cast<std::size_t>(b) *
                                            static_cast<std::size_t>(cap + 1) +
                                        static_cast<std::size_t>(lvl)];
                    w = std::max(w, c);
                    if (c > 0) h = lvl;
                }
                width_sum += w;
                phi_sum += static_cast<double>(base.ball_size(h));
            }
            widths[static_cast<std::size_t>(r)] = width_sum / static_cast<double>(roots.size());
            return phi_sum / static_cast<double>(roots.size());
        });
        report.max_width.push_back(summarize(std::move(widths)));
        report.height_moment.push_back(summarize(std::move(phis)));
    }
    auto check = [](const std::vector<Estimate>& es, bool& increasing, bool& separated) {
        increasing = separated = es.size() >= 2;
        for (std::size_t i = 1; i < es.size(); ++i) {
            if (!(es[i].mean > es[i - 1].mean)) increasing = false;
            if (!(es[i].mean - es[i].se > es[i - 1].mean + es[i - 1].se)) separated = false;
        }
    };
    check(report.max_width, report.width_increasing, report.width_bands_separated);
    check(report.height_moment, report.height_increasing, report.height_bands_separated);
    return report;
}

struct VerticalReport {
    std::vector<int> levels;
    std::vector<Estimate> ratio;       // W_n / n
    std::vector<double> frac_below;    // empirical P[W_n < (1 - kappa0) n]
    double kappa0 = 0.0;
};

// Vertical passage-time speed: W_n = d((x,n), base). The periodic
// circumference must exceed twice the top level so the cone of dependence
// fits and the cylinder computation is exact.
inline VerticalReport vertical_constant(int circumference, const DistributionSpec& dist,
                                        std::uint64_t seed, std::vector<int> levels,
                                        double kappa0, int replicas, int workers = 1,
                                        const WeightField* field_override = nullptr) {
    std::sort(levels.begin(), levels.end());
    const int max_level = levels.back();
    if (circumference <= 2 * max_level)
        fail(Errc::cap_violation, "circumference must exceed twice the top level");
    LatticeWindow window(GroupSpec::cycle(circumference), Variant::Directed, max_level,
                         BoundaryMode::Periodic);
    const int xb = window.base_index(window.base().identity());
    std::vector<std::vector<double>> wn(levels.size(),
                                        std::vector<double>(static_cast<std::size_t>(replicas)));
    run_replicas(replicas, workers, [&](int r) {
        WeightField field = field_override
                                ? *field_override
                                : WeightField(derive_seed(seed, static_cast<std::uint64_t>(r)), dist);
        PassageTimeMap ptm = directed_passage_times(window, field);
        for (std::size_t i = 0; i < levels.size(); ++i)
            wn[i][static_cast<std::size_t>(r)] = ptm.dist[window.vid(xb, levels[i])];
        return 0.0;
    });
    VerticalReport report;
    report.levels = levels;
    report.kappa0 = kappa0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double n = static_cast<double>(levels[i]);
        std::size_t below = 0;
        std::vector<double> ratios(wn[i].size());
        for (std::size_t r = 0; r < wn[i].size(); ++r) {
            ratios[r] = wn[i][r] / n;
            if (wn[i][r] < (1.0 - kappa0) * n) ++below;
        }
        report.ratio.push_back(summarize(std::move(ratios)));
        report.frac_below.push_back(static_cast<double>(below) /
                                    static_cast<double>(wn[i].size()));
    }
    return report;
}

struct ShapeEstimate {
    double time = 0.0;
    std::vector<int> positions;   // base offsets i covered by the central band
    std::vector<double> profile;  // k_i / t
    double d_hat = 0.0;           // mean of the profile
    double max_deviation = 0.0;   // max |k_i/t - d_hat|
};

// Boundary height profile of the growth set at time t on a Z strip.
// The growth set must stay strictly below the height cap.
inline ShapeEstimate shape_profile_one(const DistributionSpec& dist, std::uint64_t seed, double t,
                                       double central_fraction, int strip_radius, int height) {
    LatticeWindow window(GroupSpec::integer_lattice(1), Variant::Undirected, height,
                         BoundaryMode::Strip, strip_radius);
    WeightField field(seed, dist);
    PassageTimeMap ptm = undirected_passage_times(window, field);
    Forest forest = forest_from(ptm);
    GrowthSet g = growth_set(ptm, forest, t);
    for (int v : g.vids)
        if (window.vid_level(v) >= window.height())
            fail(Errc::cap_violation, "growth set reached the window height cap");
    std::vector<int> boundary = inner_boundary(g.vids, window);
    const int band = static_cast<int>(central_fraction * t);
    ShapeEstimate est;
    est.time = t;
    std::map<int, int> top;  // base offset -> max boundary level
    for (int v : boundary) {
        const Element& e = window.base_elements()[window.vid_base(v)];
        const int i = static_cast<int>(e.data[0]);
        if (i < -band || i > band) continue;
        auto [it, fresh] = top.emplace(i, window.vid_level(v));
        if (!fresh) it->second = std::max(it->second, window.vid_level(v));
    }
    double sum = 0.0;
    for (auto [i, k] : top) {
        est.positions.push_back(i);
        est.profile.push_back(static_cast<double>(k) / t);
        sum += est.profile.back();
    }
    if (est.profile.empty()) return est;
    est.d_hat = sum / static_cast<double>(est.profile.size());
    for (double v : est.profile)
        est.max_deviation = std::max(est.max_deviation, std::fabs(v - est.d_hat));
    return est;
}

struct ShapeSummary {
    double time = 0.0;
    double d_hat_mean = 0.0;
    double median_max_deviation = 0.0;
    std::size_t seeds = 0;
};

inline ShapeSummary summarize_shape(const std::vector<ShapeEstimate>& estimates) {
    ShapeSummary s;
    if (estimates.empty()) return s;
    s.time = estimates.front().time;
    s.seeds = estimates.size();
    std::vector<double> devs;
    for (const auto& e : estimates) {
        s.d_hat_mean += e.d_hat;
        devs.push_back(e.max_deviation);
    }
    s.d_hat_mean /= static_cast<double>(estimates.size());
    std::sort(devs.begin(), devs.end());
    const std::size_t n = devs.size();
    s.median_max_deviation = n % 2 ? devs[n / 2] : 0.5 * (devs[n / 2 - 1] + devs[n / 2]);
    return s;
}

struct MassTransportReport {
    std::size_t replicas = 0;
    bool all_exact = true;
    std::vector<std::int64_t> sent;      // per replica: total mass sent
    std::vector<std::int64_t> received;  // per replica: total mass received
};

// Deterministic per-replica audit of the transport "unit mass from y to x
// when (y,m) lies in the tree of x under the height-n restricted metric":
// total sent (level-m vertices with a root) must equal total received
// (sum over roots of level-m tree sizes), exactly.
inline MassTransportReport mass_transport_audit(const GroupSpec& base, Variant variant,
                                                const DistributionSpec& dist, std::uint64_t seed,
                                                int n, int m, int replicas, int workers = 1) {
    if (base.kind() != GroupSpec::Kind::Cycle && base.kind() != GroupSpec::Kind::Torus)
        fail(Errc::config_error, "mass transport audit requires a periodic window");
    LatticeWindow window(base, variant, n, BoundaryMode::Periodic);
    MassTransportReport report;
    report.replicas = static_cast<std::size_t>(replicas);
    report.sent.resize(static_cast<std::size_t>(replicas));
    report.received.resize(static_cast<std::size_t>(replicas));
    run_replicas(replicas, workers, [&](int r) {
        WeightField field(derive_seed(seed, static_cast<std::uint64_t>(r)), dist);
        PassageTimeMap ptm = passage_times(window, field);
        Forest forest = forest_from(ptm);
        std::int64_t sent = 0;
        for (int b = 0; b < window.base_size(); ++b)
            if (forest.root[window.vid(b, m)] >= 0) ++sent;
        // Received side recounted independently: chase each geodesic to its
        // base endpoint instead of trusting the memoized root table.
        std::vector<std::int64_t> per_root(window.base_size(), 0);
        for (int b = 0; b < window.base_size(); ++b) {
            const int v = window.vid(b, m);
            if (ptm.dist[v] >= kInfDist) continue;
            int cur = v;
            while (window.vid_level(cur) > 0) cur = ptm.pred[cur];
            ++per_root[window.vid_base(cur)];
        }
        std::int64_t received = 0;
        for (std::int64_t c : per_root) received += c;
        report.sent[static_cast<std::size_t>(r)] = sent;
        report.received[static_cast<std::size_t>(r)] = received;
        return 0.0;
    });
    for (std::size_t r = 0; r < report.sent.size(); ++r)
        if (report.sent[r] != report.received[r]) report.all_exact = false;
    if (!report.all_exact) fail(Errc::model_bug, "mass transport sums differ");
    return report;
}

}  // namespace eden
