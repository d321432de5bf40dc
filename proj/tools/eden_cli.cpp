// Command-line driver: simulation snapshots, statistics campaigns, shape
// experiments, Eden-chain checks, oracle sweeps, and SVG rendering.
//
// Exit codes: 0 pass, 1 statistical/verification fail, 2 usage or config
// error, 3 resource or cap error.

#include <cstdio>
#include <filesystem>
#include <thread>

#include <CLI11.hpp>

#include "eden/dynamics.hpp"
#include "eden/io.hpp"
#include "eden/render.hpp"
#include "eden/stats.hpp"

namespace {

using namespace eden;

constexpr const char* kToolVersion = "1.0.0";

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case Errc::config_error:
        case Errc::invalid_element:
        case Errc::variant_mismatch:
        case Errc::domain_error:
        case Errc::coupling_invalid: return 2;
        case Errc::budget_exceeded:
        case Errc::oracle_budget:
        case Errc::cap_violation:
        case Errc::out_of_window:
        case Errc::saturated: return 3;
        default: return 1;  // unreachable / model_bug: a failed verification
    }
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;
};

RunConfig load(const CommonArgs& args) {
    RunConfig config = load_config(args.config_path);
    if (args.has_seed_override) config.seed = args.seed_override;
    std::filesystem::create_directories(args.out_dir);
    return config;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    return (std::filesystem::path(args.out_dir) / name).string();
}

// ---- simulate ---------------------------------------------------------------

int cmd_simulate(const CommonArgs& args) {
    RunConfig config = load(args);
    detail::require_keys(config.params, {}, "params (simulate takes none)");
    LatticeWindow window = config.make_window();
    WeightField field(config.seed, config.dist);
    PassageTimeMap ptm = passage_times(window, field);
    Forest forest = forest_from(ptm);

    const std::string csv = forest_csv(ptm, forest);
    write_file(out_path(args, "forest.csv"), csv);

    std::size_t finite = 0;
    for (double d : ptm.dist)
        if (d < kInfDist) ++finite;
    json snapshot{{"tool_version", kToolVersion},
                  {"config", to_json(config)},
                  {"config_digest", config_digest(config)},
                  {"forest_csv", "forest.csv"},
                  {"summary", json{{"vertices", window.vertex_count()},
                                   {"finite_distance", finite},
                                   {"base_size", window.base_size()}}}};
    write_file(out_path(args, "snapshot.json"), snapshot.dump(2) + "\n");
    std::printf("simulate: %d vertices, %zu reachable -> %s\n", window.vertex_count(), finite,
                out_path(args, "snapshot.json").c_str());
    return 0;
}

// ---- stats ------------------------------------------------------------------

int cmd_stats(const CommonArgs& args) {
    RunConfig config = load(args);
    detail::require_keys(config.params,
                         {"suite", "n", "m", "levels", "caps", "replicas", "kappa0",
                          "ratio_threshold", "decay_factor"},
                         "params");
    const std::string suite = detail::get_required<std::string>(config.params, "suite", "params");
    const int replicas = config.params.value("replicas", 1000);
    std::string verdict = "pass";
    json report;

    if (suite == "level-mean") {
        LatticeWindow window = config.make_window();
        const int n = config.params.value("n", 4);
        LevelMeanReport r = level_mean(window, config.dist, config.seed,
                                       window.base().identity(), n, replicas, args.workers);
        const bool pass =
            std::fabs(r.estimate.mean - 1.0) <= 3.0 * r.estimate.se && r.partition_exact;
        verdict = pass ? "pass" : "fail";
        report = estimate_report("level-mean", json{{"n", n}}, r.estimate, verdict,
                                 "identity target 1, tolerance 3*SE");
        report["partition_exact"] = r.partition_exact;
        write_file(out_path(args, "level_mean_ledger.csv"),
                   ledger_csv("w_n", r.estimate.ledger));
    } else if (suite == "level-bound") {
        const int n = config.params.value("n", config.height);
        const int m = config.params.value("m", n);
        Estimate e = level_bound(config.base, config.variant, config.mode, config.strip_radius,
                                 config.dist, config.seed, config.base.identity(), n, m, replicas,
                                 args.workers);
        verdict = e.mean <= 1.0 + 3.0 * e.se ? "pass" : "fail";
        report = estimate_report("level-bound", json{{"n", n}, {"m", m}}, e, verdict,
                                 "unit upper bound, tolerance 3*SE");
        write_file(out_path(args, "level_bound_ledger.csv"), ledger_csv("count", e.ledger));
    } else if (suite == "survival") {
        const auto levels = detail::get_required<std::vector<int>>(config.params, "levels", "params");
        for (int n : levels)
            if (n > config.height) fail(Errc::out_of_window, "survival level beyond window height");
        SurvivalCurve curve =
            survival_curve(config.base, config.variant, config.mode, config.strip_radius,
                           config.dist, config.seed, config.base.identity(), levels, replicas,
                           args.workers);
        const double decay = config.params.value("decay_factor", 1.0);
        const bool pass = curve.fraction.back() <= decay * curve.fraction.front();
        verdict = pass ? "pass" : "fail";
        report = json{{"estimator", "survival"},
                      {"params", json{{"levels", curve.levels}, {"decay_factor", decay}}},
                      {"fractions", curve.fraction},
                      {"se", curve.se},
                      {"n_replicas", curve.replicas},
                      {"verdict", verdict},
                      {"threshold_provenance", "pilot-frozen decay factor"}};
    } else if (suite == "tails") {
        const auto caps = detail::get_required<std::vector<int>>(config.params, "caps", "params");
        TailReport r =
            tail_divergence(config.base, config.dist, config.seed, caps, replicas, args.workers);
        const bool growing = r.width_increasing && r.height_increasing;
        const bool separated = r.width_bands_separated && r.height_bands_separated;
        verdict = growing ? (separated ? "pass" : "inconclusive") : "fail";
        json per_cap = json::array();
        for (std::size_t i = 0; i < r.caps.size(); ++i)
            per_cap.push_back(json{{"cap", r.caps[i]},
                                   {"max_width_mean", r.max_width[i].mean},
                                   {"max_width_se", r.max_width[i].se},
                                   {"height_moment_mean", r.height_moment[i].mean},
                                   {"height_moment_se", r.height_moment[i].se}});
        report = json{{"estimator", "tails"},
                      {"params", json{{"caps", caps}}},
                      {"per_cap", per_cap},
                      {"n_replicas", replicas},
                      {"verdict", verdict},
                      {"threshold_provenance", "strict mean growth, 1*SE band separation"}};
    } else if (suite == "vertical") {
        if (config.base.kind() != GroupSpec::Kind::Cycle)
            fail(Errc::config_error, "vertical suite requires a cycle base");
        const auto levels = detail::get_required<std::vector<int>>(config.params, "levels", "params");
        const double kappa0 = config.params.value("kappa0", 0.05);
        const double threshold = config.params.value("ratio_threshold", 0.95);
        VerticalReport r = vertical_constant(config.base.lengths()[0], config.dist, config.seed,
                                             levels, kappa0, replicas, args.workers);
        verdict = r.ratio.back().mean <= threshold ? "pass" : "fail";
        json per_n = json::array();
        for (std::size_t i = 0; i < r.levels.size(); ++i)
            per_n.push_back(json{{"n", r.levels[i]},
                                 {"ratio_mean", r.ratio[i].mean},
                                 {"ratio_se", r.ratio[i].se},
                                 {"frac_below", r.frac_below[i]}});
        report = json{{"estimator", "vertical"},
                      {"params", json{{"levels", levels}, {"kappa0", kappa0}}},
                      {"per_level", per_n},
                      {"n_replicas", replicas},
                      {"verdict", verdict},
                      {"threshold_provenance",
                       "pilot-frozen ratio threshold " + std::to_string(threshold)}};
    } else if (suite == "mass-transport") {
        const int n = config.params.value("n", config.height);
        const int m = config.params.value("m", n);
        MassTransportReport r = mass_transport_audit(config.base, config.variant, config.dist,
                                                     config.seed, n, m, replicas, args.workers);
        verdict = r.all_exact ? "pass" : "fail";
        report = json{{"estimator", "mass-transport"},
                      {"params", json{{"n", n}, {"m", m}}},
                      {"all_exact", r.all_exact},
                      {"n_replicas", r.replicas},
                      {"verdict", verdict},
                      {"threshold_provenance", "exact per-replica equality"}};
    } else {
        fail(Errc::config_error, "unknown stats suite \"" + suite + "\"");
    }

    report["config_digest"] = config_digest(config);
    write_file(out_path(args, "report_" + suite + ".json"), report.dump(2) + "\n");
    std::printf("stats %s: %s\n", suite.c_str(), verdict.c_str());
    return verdict == "fail" ? 1 : 0;
}

// ---- shape ------------------------------------------------------------------

int cmd_shape(const CommonArgs& args) {
    RunConfig config = load(args);
    if (config.variant != Variant::Undirected)
        fail(Errc::config_error, "the shape experiment is defined for the undirected model");
    detail::require_keys(config.params,
                         {"times", "seeds", "central_fraction", "height_factor", "width_factor",
                          "render"},
                         "params");
    const auto times = detail::get_required<std::vector<double>>(config.params, "times", "params");
    const int seeds = config.params.value("seeds", 20);
    const double central = config.params.value("central_fraction", 0.8);
    const double hf = config.params.value("height_factor", 3.2);
    const double wf = config.params.value("width_factor", 3.0);
    const bool render = config.params.value("render", false);

    json records = json::array();
    std::vector<ShapeSummary> summaries;
    for (double t : times) {
        const int height = static_cast<int>(hf * t) + 10;
        const int radius = static_cast<int>(wf * t) + 10;
        std::vector<ShapeEstimate> estimates(static_cast<std::size_t>(seeds));
        run_replicas(seeds, args.workers, [&](int s) {
            estimates[static_cast<std::size_t>(s)] = shape_profile_one(
                config.dist, derive_seed(config.seed, static_cast<std::uint64_t>(s)), t, central,
                radius, height);
            return 0.0;
        });
        ShapeSummary sum = summarize_shape(estimates);
        summaries.push_back(sum);
        records.push_back(json{{"t", t},
                               {"d_hat_mean", sum.d_hat_mean},
                               {"median_max_deviation", sum.median_max_deviation},
                               {"seeds", sum.seeds}});
        std::string csv = "seed,d_hat,max_deviation\n";
        for (int s = 0; s < seeds; ++s) {
            const ShapeEstimate& e = estimates[static_cast<std::size_t>(s)];
            csv += std::to_string(s) + ',' + format_distance(e.d_hat) + ',' +
                   format_distance(e.max_deviation) + '\n';
        }
        write_file(out_path(args, "shape_t" + std::to_string(static_cast<int>(t)) + ".csv"), csv);

        if (render) {
            LatticeWindow window(GroupSpec::integer_lattice(1), Variant::Undirected, height,
                                 BoundaryMode::Strip, radius);
            WeightField field(derive_seed(config.seed, 0), config.dist);
            PassageTimeMap ptm = undirected_passage_times(window, field);
            Forest forest = forest_from(ptm);
            GrowthSet g = growth_set(ptm, forest, t);
            StyleConfig style;
            style.cell_size = 2;
            RenderResult img = render_growth(
                g, window, style, FlatnessBand{summaries.back().d_hat_mean, 2.0 * std::pow(t, -0.1)});
            write_file(out_path(args, "growth_t" + std::to_string(static_cast<int>(t)) + ".svg"),
                       img.svg);
        }
    }

    json report{{"estimator", "shape"},
                {"records", records},
                {"config_digest", config_digest(config)}};
    if (times.size() > 1) {
        bool dev_non_increasing = true;
        for (std::size_t i = 1; i < summaries.size(); ++i)
            if (summaries[i].median_max_deviation > summaries[i - 1].median_max_deviation)
                dev_non_increasing = false;
        const double last = summaries.back().d_hat_mean;
        const double prev = summaries[summaries.size() - 2].d_hat_mean;
        const bool d_stable = std::fabs(last - prev) <= 0.05 * std::fabs(prev);
        report["verdict"] = dev_non_increasing && d_stable ? "pass" : "fail";
        report["threshold_provenance"] =
            "median deviation non-increasing in t; last two d-hat within 5%";
    } else {
        report["verdict"] = "profile-only";
    }
    write_file(out_path(args, "shape.json"), report.dump(2) + "\n");
    std::printf("shape: %s\n", report["verdict"].get<std::string>().c_str());
    return report["verdict"] == "fail" ? 1 : 0;
}

// ---- eden -------------------------------------------------------------------

int cmd_eden(const CommonArgs& args) {
    RunConfig config = load(args);
    detail::require_keys(config.params, {"steps", "replicas", "alpha", "expect_rejection"},
                         "params");
    const bool expect_rejection = config.params.value("expect_rejection", false);
    if (config.dist.kind != DistributionSpec::Kind::Exponential && !expect_rejection)
        fail(Errc::coupling_invalid,
             "the Eden coupling requires exponential weights (set expect_rejection for "
             "negative controls)");
    const int steps = config.params.value("steps", 3);
    const int replicas = config.params.value("replicas", 5000);
    const double alpha = config.params.value("alpha", 0.001);

    LatticeWindow window = config.make_window();
    MemorylessnessReport r =
        memorylessness_test(window, config.dist, steps, replicas, config.seed);
    double min_p = 1.0;
    json per_step = json::array();
    for (const StepReport& sr : r.steps) {
        min_p = std::min(min_p, sr.min_p_value);
        json classes = json::array();
        for (const StepClassResult& cls : sr.classes)
            classes.push_back(json{{"class", cls.class_key},
                                   {"boundary_size", cls.boundary_size},
                                   {"samples", cls.samples},
                                   {"chi2", cls.chi.statistic},
                                   {"df", cls.chi.df},
                                   {"p_value", cls.chi.p_value}});
        per_step.push_back(json{{"step", sr.step},
                                {"min_p_value", sr.min_p_value},
                                {"skipped_classes", sr.skipped_classes},
                                {"classes", classes}});
    }
    const bool uniform_ok = min_p >= alpha;
    std::string verdict;
    if (expect_rejection)
        verdict = uniform_ok ? "fail" : "pass";  // the control must be rejected
    else
        verdict = uniform_ok ? "pass" : "fail";
    json report{{"estimator", "eden-memorylessness"},
                {"params", json{{"steps", steps}, {"alpha", alpha},
                                {"expect_rejection", expect_rejection}}},
                {"per_step", per_step},
                {"min_p_value", min_p},
                {"n_replicas", replicas},
                {"verdict", verdict},
                {"config_digest", config_digest(config)},
                {"threshold_provenance", "chi-square uniformity at configured alpha"}};
    write_file(out_path(args, "eden.json"), report.dump(2) + "\n");
    std::printf("eden: min p = %g, %s\n", min_p, verdict.c_str());
    return verdict == "pass" ? 0 : 1;
}

// ---- oracle -----------------------------------------------------------------

int cmd_oracle(const CommonArgs& args) {
    RunConfig config = load(args);
    detail::require_keys(config.params, {"seeds", "path_budget"}, "params");
    const int seeds = config.params.value("seeds", 100);
    const std::size_t budget = config.params.value("path_budget", std::size_t{1000000});
    LatticeWindow window = config.make_window();
    double max_delta = 0.0;
    for (int s = 0; s < seeds; ++s) {
        WeightField field(derive_seed(config.seed, static_cast<std::uint64_t>(s)), config.dist);
        PassageTimeMap ptm = passage_times(window, field);
        for (int v = 0; v < window.vertex_count(); ++v) {
            const double oracle = brute_force_passage_time(window, field, window.vertex(v), budget);
            max_delta = std::max(max_delta, std::fabs(ptm.dist[v] - oracle));
        }
    }
    const bool pass = max_delta <= 1e-12;
    json report{{"estimator", "oracle"},
                {"params", json{{"seeds", seeds}}},
                {"max_abs_delta", max_delta},
                {"verdict", pass ? "pass" : "fail"},
                {"config_digest", config_digest(config)},
                {"threshold_provenance", "exhaustive path enumeration, tolerance 1e-12"}};
    write_file(out_path(args, "oracle.json"), report.dump(2) + "\n");
    std::printf("oracle: max |delta| = %g, %s\n", max_delta, pass ? "pass" : "fail");
    return pass ? 0 : 1;
}

// ---- render -----------------------------------------------------------------

int cmd_render(const CommonArgs& args, bool geodesics, double growth_t) {
    // args.config_path points at a snapshot; the embedded config reproduces
    // the scene deterministically.
    json snapshot;
    try {
        snapshot = json::parse(read_file(args.config_path));
    } catch (const json::exception& e) {
        fail(Errc::config_error, std::string("snapshot is not valid JSON: ") + e.what());
    }
    if (!snapshot.contains("config")) fail(Errc::config_error, "snapshot has no embedded config");
    RunConfig config = config_from_json(snapshot.at("config"));
    std::filesystem::create_directories(args.out_dir);

    LatticeWindow window = config.make_window();
    WeightField field(config.seed, config.dist);
    PassageTimeMap ptm = passage_times(window, field);
    Forest forest = forest_from(ptm);
    StyleConfig style;
    style.layer_geodesics = geodesics;
    RenderResult img = render_forest(ptm, forest, style);
    write_file(out_path(args, "forest.svg"), img.svg);
    write_file(out_path(args, "forest_legend.json"), img.legend_json);
    if (growth_t > 0.0) {
        GrowthSet g = growth_set(ptm, forest, growth_t);
        RenderResult gr = render_growth(g, window, style);
        write_file(out_path(args, "growth.svg"), gr.svg);
    }
    std::printf("render: wrote %s\n", out_path(args, "forest.svg").c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary growth-forest simulator and verification toolkit"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    CommonArgs args;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", args.config_path, "config (or snapshot) JSON path")
            ->required();
        cmd->add_option("--out", args.out_dir, "output directory");
        cmd->add_option("--workers", args.workers, "worker threads");
        cmd->add_option("--seed", args.seed_override, "seed override")
            ->each([&](const std::string&) { args.has_seed_override = true; });
    };

    auto* simulate = app.add_subcommand("simulate", "compute a forest snapshot");
    add_common(simulate);
    auto* stats = app.add_subcommand("stats", "run a statistics suite");
    add_common(stats);
    auto* shape = app.add_subcommand("shape", "boundary flatness experiment");
    add_common(shape);
    auto* eden = app.add_subcommand("eden", "Eden-chain uniformity checks");
    add_common(eden);
    auto* oracle = app.add_subcommand("oracle", "kernel-vs-enumeration sweep");
    add_common(oracle);
    auto* render = app.add_subcommand("render", "render a snapshot to SVG");
    add_common(render);
    bool geodesics = false;
    double growth_t = 0.0;
    render->add_flag("--geodesics", geodesics, "overdraw geodesic edges");
    render->add_option("--growth-t", growth_t, "also render the growth set at time t");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // usage errors exit 2; --help/--version exit 0
    }

    try {
        if (simulate->parsed()) return cmd_simulate(args);
        if (stats->parsed()) return cmd_stats(args);
        if (shape->parsed()) return cmd_shape(args);
        if (eden->parsed()) return cmd_eden(args);
        if (oracle->parsed()) return cmd_oracle(args);
        if (render->parsed()) return cmd_render(args, geodesics, growth_t);
    } catch (const eden::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
