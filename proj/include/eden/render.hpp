#pragma once

#include <cstdio>
#include <map>
#include <set>
#include <optional>
#include <string>
#include <vector>

#include "eden/fpp.hpp"

namespace eden {

struct StyleConfig {
    int cell_size = 8;                 // pixels per lattice cell
    std::uint64_t palette_seed = 0;    // rotates the fixed palette
    bool layer_trees = true;           // cells colored by root
    bool layer_geodesics = false;      // predecessor edges overdrawn
    bool layer_boundary = true;        // inner boundary highlight (growth scenes)
    bool layer_band = true;            // flatness band overlay when provided
};

struct FlatnessBand {
    double center = 0.0;  // d-hat, in levels per unit time
    double width = 0.0;   // half-width, same units
};

struct RenderResult {
    std::string svg;
    std::string legend_json;  // root label -> color
};

namespace detail {

inline std::string color_hex(double hue) {
    // HSV -> RGB at fixed saturation/value; hue in [0,1).
    const double s = 0.62, v = 0.86;
    const double h6 = hue * 6.0;
    const int i = static_cast<int>(h6) % 6;
    const double f = h6 - static_cast<double>(static_cast<int>(h6));
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    double r = 0, g = 0, b = 0;
    switch (i) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(r * 255.0 + 0.5), static_cast<int>(g * 255.0 + 0.5),
                  static_cast<int>(b * 255.0 + 0.5));
    return buf;
}

inline std::string element_label(const Element& e) {
    std::string s;
    for (std::size_t i = 0; i < e.data.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(e.data[i]);
    }
    return s;
}

// Hash each root key into a fixed palette of slots; collisions are resolved
// by probing in sorted (hash, label) order, so the assignment is injective
// and re-renders of the same scene reproduce the same colors.
inline std::map<int, std::string> assign_colors(const LatticeWindow& window,
                                                const std::vector<int>& root_ids,
                                                std::uint64_t palette_seed) {
    constexpr int kSlots = 1024;
    std::vector<std::pair<std::uint64_t, int>> order;
    for (int b : root_ids) {
        const ByteKey key = window.base().canonical_key(window.base_elements()[b]);
        order.emplace_back(splitmix64(content_hash(key) ^ palette_seed), b);
    }
    std::sort(order.begin(), order.end(), [&](const auto& l, const auto& r) {
        if (l.first != r.first) return l.first < r.first;
        return window.base_elements()[l.second] < window.base_elements()[r.second];
    });
    if (order.size() > kSlots) fail(Errc::cap_violation, "more roots than palette slots");
    std::vector<char> taken(kSlots, 0);
    std::set<std::string> used_hex;  // nearby hues can quantize to one RGB
    std::map<int, std::string> colors;
    for (const auto& [h, b] : order) {
        int slot = static_cast<int>(h % kSlots);
        std::string hex;
        for (int probes = 0;; ++probes) {
            if (probes > kSlots) fail(Errc::cap_violation, "palette exhausted");
            if (!taken[slot]) {
                hex = color_hex(static_cast<double>(slot) / static_cast<double>(kSlots));
                if (!used_hex.count(hex)) break;
            }
            slot = (slot + 1) % kSlots;
        }
        taken[slot] = 1;
        used_hex.insert(hex);
        colors[b] = hex;
    }
    return colors;
}

// 1-d bases draw directly; 2-d bases draw the slice with second coordinate
// zero. Anything else has no grid embedding here.
inline bool in_slice(const Element& e) {
    for (std::size_t i = 1; i < e.data.size(); ++i)
        if (e.data[i] != 0) return false;
    return true;
}

inline void check_layout(const GroupSpec& base) {
    if (base.kind() == GroupSpec::Kind::FreeGroup || base.rank() > 2)
        fail(Errc::domain_error,
             "base has no planar grid layout; export a tabular snapshot instead");
}

struct Grid {
    std::vector<int> xs;        // per base index: column, or -1 when off-slice
    int columns = 0;
    int rows = 0;  // levels 0..height
    int width_px = 0;
    int height_px = 0;
};

inline Grid make_grid(const LatticeWindow& window, int cell) {
    Grid grid;
    grid.xs.assign(static_cast<std::size_t>(window.base_size()), -1);
    std::int64_t min_x = 0;
    bool any = false;
    for (int b = 0; b < window.base_size(); ++b) {
        const Element& e = window.base_elements()[static_cast<std::size_t>(b)];
        if (!in_slice(e)) continue;
        if (!any || e.data[0] < min_x) min_x = e.data[0];
        any = true;
    }
    for (int b = 0; b < window.base_size(); ++b) {
        const Element& e = window.base_elements()[static_cast<std::size_t>(b)];
        if (!in_slice(e)) continue;
        grid.xs[static_cast<std::size_t>(b)] = static_cast<int>(e.data[0] - min_x);
        grid.columns = std::max(grid.columns, grid.xs[static_cast<std::size_t>(b)] + 1);
    }
    grid.rows = window.height() + 1;
    grid.width_px = grid.columns * cell;
    grid.height_px = grid.rows * cell;
    return grid;
}

inline void rect(std::string& svg, int x_px, int y_px, int cell, const std::string& fill,
                 const char* cls) {
    svg += "<rect class=\"";
    svg += cls;
    svg += "\" x=\"" + std::to_string(x_px) + "\" y=\"" + std::to_string(y_px) + "\" width=\"" +
           std::to_string(cell) + "\" height=\"" + std::to_string(cell) + "\" fill=\"" + fill +
           "\"/>\n";
}

inline std::string svg_open(const Grid& grid) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(grid.width_px) + "\" height=\"" + std::to_string(grid.height_px) +
           "\" viewBox=\"0 0 " + std::to_string(grid.width_px) + " " +
           std::to_string(grid.height_px) + "\">\n";
}

inline std::string legend_json(const LatticeWindow& window,
                               const std::map<int, std::string>& colors) {
    std::string out = "{\n";
    bool first = true;
    for (const auto& [b, color] : colors) {
        if (!first) out += ",\n";
        first = false;
        out += "  \"" + element_label(window.base_elements()[static_cast<std::size_t>(b)]) +
               "\": \"" + color + "\"";
    }
    out += "\n}\n";
    return out;
}

}  // namespace detail

// One colored cell per rooted vertex, keyed by root; optional predecessor
// edges overdrawn as a geodesic layer.
inline RenderResult render_forest(const PassageTimeMap& ptm, const Forest& forest,
                                  const StyleConfig& style) {
    if (style.cell_size < 1) fail(Errc::config_error, "cell size must be at least 1 pixel");
    const LatticeWindow& window = *forest.window;
    detail::check_layout(window.base());
    const int cell = style.cell_size;
    detail::Grid grid = detail::make_grid(window, cell);

    std::vector<int> roots_present;
    for (int v = 0; v < window.vertex_count(); ++v) {
        if (forest.root[v] < 0) continue;
        if (grid.xs[static_cast<std::size_t>(window.vid_base(v))] < 0) continue;
        roots_present.push_back(forest.root[v]);
    }
    std::sort(roots_present.begin(), roots_present.end());
    roots_present.erase(std::unique(roots_present.begin(), roots_present.end()),
                        roots_present.end());
    auto colors = detail::assign_colors(window, roots_present, style.palette_seed);

    std::string svg = detail::svg_open(grid);
    auto cell_x = [&](int v) { return grid.xs[static_cast<std::size_t>(window.vid_base(v))] * cell; };
    auto cell_y = [&](int v) { return (window.height() - window.vid_level(v)) * cell; };
    if (style.layer_trees) {
        for (int v = 0; v < window.vertex_count(); ++v) {
            if (forest.root[v] < 0) continue;
            if (grid.xs[static_cast<std::size_t>(window.vid_base(v))] < 0) continue;
            detail::rect(svg, cell_x(v), cell_y(v), cell, colors.at(forest.root[v]), "tree");
        }
    }
    if (style.layer_geodesics) {
        for (int v = 0; v < window.vertex_count(); ++v) {
            const int p = ptm.pred[v];
            if (p < 0 || forest.root[v] < 0) continue;
            if (grid.xs[static_cast<std::size_t>(window.vid_base(v))] < 0) continue;
            if (grid.xs[static_cast<std::size_t>(window.vid_base(p))] < 0) continue;
            svg += "<line class=\"geo\" x1=\"" + std::to_string(cell_x(v) + cell / 2) +
                   "\" y1=\"" + std::to_string(cell_y(v) + cell / 2) + "\" x2=\"" +
                   std::to_string(cell_x(p) + cell / 2) + "\" y2=\"" +
                   std::to_string(cell_y(p) + cell / 2) +
                   "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
        }
    }
    svg += "</svg>\n";
    return {std::move(svg), detail::legend_json(window, colors)};
}

// Occupied cells shaded, the inner boundary highlighted, and an optional
// horizontal flatness band at levels t*(center +- width).
inline RenderResult render_growth(const GrowthSet& growth, const LatticeWindow& window,
                                  const StyleConfig& style,
                                  std::optional<FlatnessBand> band = std::nullopt) {
    if (style.cell_size < 1) fail(Errc::config_error, "cell size must be at least 1 pixel");
    detail::check_layout(window.base());
    const int cell = style.cell_size;
    detail::Grid grid = detail::make_grid(window, cell);

    std::vector<int> boundary = inner_boundary(growth.vids, window);
    std::vector<char> on_boundary(static_cast<std::size_t>(window.vertex_count()), 0);
    for (int v : boundary) on_boundary[static_cast<std::size_t>(v)] = 1;

    std::string svg = detail::svg_open(grid);
    auto cell_x = [&](int v) { return grid.xs[static_cast<std::size_t>(window.vid_base(v))] * cell; };
    auto cell_y = [&](int v) { return (window.height() - window.vid_level(v)) * cell; };
    for (int v : growth.vids) {
        if (grid.xs[static_cast<std::size_t>(window.vid_base(v))] < 0) continue;
        const bool hl = style.layer_boundary && on_boundary[static_cast<std::size_t>(v)];
        detail::rect(svg, cell_x(v), cell_y(v), cell, hl ? "#d62728" : "#9c9c9c",
                     hl ? "boundary" : "occupied");
    }
    if (band && style.layer_band) {
        const int lo = static_cast<int>(std::lround(growth.time * (band->center - band->width)));
        const int hi = static_cast<int>(std::lround(growth.time * (band->center + band->width)));
        for (int lvl = lo; lvl <= hi; ++lvl) {
            if (lvl < 0 || lvl > window.height()) continue;
            const int y = (window.height() - lvl) * cell;
            svg += "<line class=\"band\" x1=\"0\" y1=\"" + std::to_string(y + cell / 2) +
                   "\" x2=\"" + std::to_string(grid.width_px) + "\" y2=\"" +
                   std::to_string(y + cell / 2) +
                   "\" stroke=\"#1f77b4\" stroke-width=\"1\" stroke-opacity=\"0.6\"/>\n";
        }
    }
    svg += "</svg>\n";
    return {std::move(svg), "{}\n"};
}

}  // namespace eden
