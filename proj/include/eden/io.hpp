#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "eden/fpp.hpp"
#include "eden/stats.hpp"

namespace eden {

using json = nlohmann::json;

constexpr int kSchemaVersion = 1;

// ---- helpers ---------------------------------------------------------------

namespace detail {

inline void require_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
    if (!obj.is_object()) fail(Errc::config_error, where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            fail(Errc::config_error, "unknown key \"" + key + "\" in " + where);
    }
}

template <typename T>
T get_required(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) fail(Errc::config_error, where + " requires \"" + key + "\"");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        fail(Errc::config_error, "key \"" + key + "\" in " + where + " has the wrong type");
    }
}

}  // namespace detail

// ---- group spec ------------------------------------------------------------

inline json to_json(const GroupSpec& g) {
    json params;
    switch (g.kind()) {
        case GroupSpec::Kind::IntegerLattice: params["d"] = g.rank(); break;
        case GroupSpec::Kind::Cycle: params["L"] = g.lengths()[0]; break;
        case GroupSpec::Kind::Torus: params["lengths"] = g.lengths(); break;
        case GroupSpec::Kind::FreeGroup:
            params["k"] = g.rank();
            params["max_word_len"] = g.max_word_len();
            break;
    }
    return json{{"kind", g.kind_name()}, {"params", params}};
}

inline GroupSpec group_from_json(const json& j) {
    detail::require_keys(j, {"kind", "params"}, "base");
    const auto kind = detail::get_required<std::string>(j, "kind", "base");
    const json params = j.value("params", json::object());
    if (kind == "integer-lattice") {
        detail::require_keys(params, {"d"}, "base.params");
        return GroupSpec::integer_lattice(detail::get_required<int>(params, "d", "base.params"));
    }
    if (kind == "cycle") {
        detail::require_keys(params, {"L"}, "base.params");
        return GroupSpec::cycle(detail::get_required<int>(params, "L", "base.params"));
    }
    if (kind == "torus") {
        detail::require_keys(params, {"lengths"}, "base.params");
        return GroupSpec::torus(
            detail::get_required<std::vector<int>>(params, "lengths", "base.params"));
    }
    if (kind == "free-group") {
        detail::require_keys(params, {"k", "max_word_len"}, "base.params");
        return GroupSpec::free_group(detail::get_required<int>(params, "k", "base.params"),
                                     params.value("max_word_len", 64));
    }
    fail(Errc::config_error, "unknown base kind \"" + kind + "\"");
}

// ---- distribution ----------------------------------------------------------

inline json to_json(const DistributionSpec& d) {
    json params;
    switch (d.kind) {
        case DistributionSpec::Kind::Exponential: params["rate"] = d.a; break;
        case DistributionSpec::Kind::Uniform:
            params["a"] = d.a;
            params["b"] = d.b;
            break;
        case DistributionSpec::Kind::Weibull:
            params["shape"] = d.a;
            params["scale"] = d.b;
            break;
    }
    return json{{"kind", d.name()}, {"params", params}};
}

inline DistributionSpec dist_from_json(const json& j) {
    detail::require_keys(j, {"kind", "params"}, "dist");
    const auto kind = detail::get_required<std::string>(j, "kind", "dist");
    const json params = j.value("params", json::object());
    if (kind == "exponential") {
        detail::require_keys(params, {"rate"}, "dist.params");
        return DistributionSpec::exponential(
            detail::get_required<double>(params, "rate", "dist.params"));
    }
    if (kind == "uniform") {
        detail::require_keys(params, {"a", "b"}, "dist.params");
        return DistributionSpec::uniform(detail::get_required<double>(params, "a", "dist.params"),
                                         detail::get_required<double>(params, "b", "dist.params"));
    }
    if (kind == "weibull") {
        detail::require_keys(params, {"shape", "scale"}, "dist.params");
        return DistributionSpec::weibull(
            detail::get_required<double>(params, "shape", "dist.params"),
            detail::get_required<double>(params, "scale", "dist.params"));
    }
    fail(Errc::config_error, "unknown dist kind \"" + kind +
                                 "\" (only non-atomic laws on [0,inf) are supported: "
                                 "exponential, uniform, weibull)");
}

// ---- run config ------------------------------------------------------------

struct RunConfig {
    GroupSpec base = GroupSpec::integer_lattice(1);
    Variant variant = Variant::Directed;
    int height = 1;
    BoundaryMode mode = BoundaryMode::Periodic;
    int strip_radius = 0;
    DistributionSpec dist = DistributionSpec::exponential(1.0);
    std::uint64_t seed = 0;
    json params = json::object();  // command-specific parameters

    LatticeWindow make_window() const {
        return LatticeWindow(base, variant, height, mode, strip_radius);
    }
};

inline json to_json(const RunConfig& c) {
    json boundary{{"mode", c.mode == BoundaryMode::Periodic ? "periodic" : "strip"}};
    if (c.mode == BoundaryMode::Strip) boundary["radius"] = c.strip_radius;
    return json{{"schema_version", kSchemaVersion},
                {"base", to_json(c.base)},
                {"variant", variant_name(c.variant)},
                {"height", c.height},
                {"boundary", boundary},
                {"dist", to_json(c.dist)},
                {"seed", c.seed},
                {"params", c.params}};
}

inline RunConfig config_from_json(const json& j) {
    detail::require_keys(
        j, {"schema_version", "base", "variant", "height", "boundary", "dist", "seed", "params"},
        "config");
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion)
        fail(Errc::config_error, "unsupported schema_version");
    RunConfig c;
    c.base = group_from_json(detail::get_required<json>(j, "base", "config"));
    const auto variant = detail::get_required<std::string>(j, "variant", "config");
    if (variant == "directed")
        c.variant = Variant::Directed;
    else if (variant == "undirected")
        c.variant = Variant::Undirected;
    else
        fail(Errc::config_error, "variant must be \"directed\" or \"undirected\"");
    c.height = detail::get_required<int>(j, "height", "config");
    const json boundary = detail::get_required<json>(j, "boundary", "config");
    detail::require_keys(boundary, {"mode", "radius"}, "boundary");
    const auto mode = detail::get_required<std::string>(boundary, "mode", "boundary");
    if (mode == "periodic") {
        c.mode = BoundaryMode::Periodic;
    } else if (mode == "strip") {
        c.mode = BoundaryMode::Strip;
        c.strip_radius = detail::get_required<int>(boundary, "radius", "boundary");
    } else {
        fail(Errc::config_error, "boundary.mode must be \"periodic\" or \"strip\"");
    }
    c.dist = dist_from_json(detail::get_required<json>(j, "dist", "config"));
    c.seed = detail::get_required<std::uint64_t>(j, "seed", "config");
    c.params = j.value("params", json::object());
    if (!c.params.is_object()) fail(Errc::config_error, "params must be an object");
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::config_error, "cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(Errc::config_error, std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

// Content digest of the canonical serialization; reruns of one config must
// reproduce it.
inline std::uint64_t config_digest(const RunConfig& c) {
    const std::string dump = to_json(c).dump();
    return content_hash(ByteKey(dump.begin(), dump.end()));
}

// ---- snapshot CSV ----------------------------------------------------------

inline std::string csv_element_label(const Element& e) {
    std::string s;
    for (std::size_t i = 0; i < e.data.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(e.data[i]);
    }
    return s;
}

inline std::string format_distance(double d) {
    if (d == kInfDist) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    return buf;
}

// One row per vertex: element key, level, distance, predecessor key, root key.
inline std::string forest_csv(const PassageTimeMap& ptm, const Forest& forest) {
    const LatticeWindow& w = *ptm.window;
    std::string out = "element,level,distance,pred_element,pred_level,root\n";
    for (int v = 0; v < w.vertex_count(); ++v) {
        out += csv_element_label(w.base_elements()[w.vid_base(v)]);
        out += ',' + std::to_string(w.vid_level(v));
        out += ',' + format_distance(ptm.dist[v]);
        if (ptm.pred[v] >= 0) {
            out += ',' + csv_element_label(w.base_elements()[w.vid_base(ptm.pred[v])]);
            out += ',' + std::to_string(w.vid_level(ptm.pred[v]));
        } else {
            out += ",,";
        }
        out += ',';
        if (forest.root[v] >= 0) out += csv_element_label(w.base_elements()[forest.root[v]]);
        out += '\n';
    }
    return out;
}

// ---- reports ---------------------------------------------------------------

inline json estimate_report(const std::string& estimator, const json& params,
                            const Estimate& est, const std::string& verdict,
                            const std::string& threshold_provenance) {
    return json{{"estimator", estimator},
                {"params", params},
                {"mean", est.mean},
                {"se", est.se},
                {"n_replicas", est.n},
                {"verdict", verdict},
                {"threshold_provenance", threshold_provenance}};
}

inline std::string ledger_csv(const std::string& statistic, const std::vector<double>& ledger) {
    std::string out = "replica," + statistic + "\n";
    for (std::size_t r = 0; r < ledger.size(); ++r)
        out += std::to_string(r) + ',' + format_distance(ledger[r]) + '\n';
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::config_error, "cannot write file: " + path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::config_error, "cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace eden
