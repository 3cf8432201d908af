#pragma once

#include "errors.hpp"
#include "field.hpp"
#include "merge_tree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace tlp {

struct Rect {
    double x0 = 0.0;
    double x1 = 0.0;
    double y0 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Width of a basin from `value` up to the next step.
struct WidthStep {
    double value = 0.0;
    double width = 0.0;
    friend bool operator==(const WidthStep&, const WidthStep&) = default;
};

/// One merge-tree branch drawn as a valley. Index i of LandscapeProfile::basins
/// corresponds to branch i of the decomposition the profile was built from.
struct Basin {
    std::size_t minimum_node = 0;
    std::size_t terminal_node = 0;
    std::size_t minimum_vertex = 0;
    std::optional<std::size_t> parent;
    /// Descending persistence, ties by minimum vertex.
    std::vector<std::size_t> children;
    int side = 0; // +1 right of the parent's core, -1 left, 0 for roots

    double bottom = 0.0;
    double top = 0.0;
    double persistence = 0.0;
    std::size_t own_count = 0;
    std::size_t total_count = 0;

    std::vector<WidthStep> steps;
    std::vector<Rect> rects;
    double x0 = 0.0;
    double x1 = 0.0;
    double center = 0.0;

    std::vector<std::size_t> members;
    double avg_loss = 0.0;
    /// Position on the color ramp: 0 darkest (lowest average loss).
    double shade = 0.0;
    std::string color;

    friend bool operator==(const Basin&, const Basin&) = default;
};

enum class MarkerKind { minimum, saddle };

inline const char* to_string(MarkerKind k)
{
    return k == MarkerKind::minimum ? "minimum" : "saddle";
}

struct Marker {
    double x = 0.0;
    double y = 0.0;
    MarkerKind kind = MarkerKind::minimum;
    std::size_t node = 0;
    friend bool operator==(const Marker&, const Marker&) = default;
};

struct LandscapeProfile {
    std::vector<Basin> basins;
    /// Root basins left to right, ordered by component minimum.
    std::vector<std::size_t> roots;
    std::vector<Marker> markers;
    double width = 0.0;
    double value_min = 0.0;
    double value_max = 0.0;

    friend bool operator==(const LandscapeProfile&, const LandscapeProfile&) = default;
};

/// Nested basin geometry. A basin's width at each of its own member values is
/// its own population up to that value plus the full population of every
/// sub-basin already attached (saddle at or below that value). Sub-basins take
/// fixed x-intervals beside the parent's core, alternating right and left in
/// descending persistence, and attach in sweep order of their saddles, so no
/// two rectangles overlap and every cut's total width equals the number of
/// vertices at or below it.
inline LandscapeProfile build_profile(const MergeTree& tree, const BranchDecomposition& decomp)
{
    const auto& branches = decomp.branches;
    const auto& nodes = tree.nodes;
    LandscapeProfile profile;
    profile.basins.resize(branches.size());
    if (!tree.values.empty()) {
        const auto [lo, hi] = std::minmax_element(tree.values.begin(), tree.values.end());
        profile.value_min = *lo;
        profile.value_max = *hi;
    }

    for (std::size_t b = 0; b < branches.size(); ++b) {
        const auto& br = branches[b];
        auto& basin = profile.basins[b];
        basin.minimum_node = br.minimum_node;
        basin.terminal_node = br.terminal_node;
        basin.minimum_vertex = nodes[br.minimum_node].vertex;
        basin.parent = br.parent;
        basin.bottom = br.birth;
        basin.top = br.death;
        basin.persistence = br.persistence;
        basin.own_count = br.members.size();
        basin.members = br.members;
        basin.children = br.children;
        std::sort(basin.children.begin(), basin.children.end(), [&](std::size_t a, std::size_t c) {
            if (branches[a].persistence != branches[c].persistence)
                return branches[a].persistence > branches[c].persistence;
            return nodes[branches[a].minimum_node].vertex < nodes[branches[c].minimum_node].vertex;
        });
        for (std::size_t i = 0; i < basin.children.size(); ++i)
            profile.basins[basin.children[i]].side = (i % 2 == 0) ? 1 : -1;
    }

    // Children have larger branch indices than parents (their minima come
    // later in the sweep), so a descending pass accumulates subtree totals.
    for (std::size_t b = branches.size(); b-- > 0;) {
        auto& basin = profile.basins[b];
        basin.total_count += basin.own_count;
        if (basin.parent)
            profile.basins[*basin.parent].total_count += basin.total_count;
    }

    auto layout = [&](std::size_t b, double left) {
        auto& basin = profile.basins[b];
        basin.x0 = left;
        basin.x1 = left + static_cast<double>(basin.total_count);

        double left_total = 0.0;
        for (std::size_t c : basin.children)
            if (profile.basins[c].side < 0)
                left_total += static_cast<double>(profile.basins[c].total_count);
        basin.center = left + static_cast<double>(basin.own_count) / 2.0 + left_total;

        std::vector<double> own_values;
        own_values.reserve(basin.members.size());
        for (std::size_t v : basin.members)
            own_values.push_back(tree.values[v]);
        std::sort(own_values.begin(), own_values.end());

        std::vector<std::size_t> attach = basin.children;
        std::sort(attach.begin(), attach.end(), [&](std::size_t a, std::size_t c) {
            return profile.basins[a].terminal_node < profile.basins[c].terminal_node;
        });

        std::size_t next_child = 0;
        double left_acc = 0.0;
        double right_acc = 0.0;
        std::size_t i = 0;
        while (i < own_values.size()) {
            const double y = own_values[i];
            while (i < own_values.size() && own_values[i] == y)
                ++i;
            const double half_core = static_cast<double>(i) / 2.0;
            while (next_child < attach.size() && profile.basins[attach[next_child]].top <= y) {
                auto& child = profile.basins[attach[next_child]];
                const double w = static_cast<double>(child.total_count);
                if (child.side > 0) {
                    child.x0 = basin.center + half_core + right_acc;
                    right_acc += w;
                } else {
                    child.x0 = basin.center - half_core - left_acc - w;
                    left_acc += w;
                }
                ++next_child;
            }
            const double x0 = basin.center - half_core - left_acc;
            const double x1 = basin.center + half_core + right_acc;
            const double y1 = i < own_values.size() ? own_values[i] : basin.top;
            basin.steps.push_back({y, x1 - x0});
            basin.rects.push_back({x0, x1, y, y1});
        }
        if (next_child != attach.size())
            throw Error("internal: sub-basin saddle above its parent's top");
    };

    double cursor = 0.0;
    std::vector<std::size_t> pending;
    for (std::size_t m : decomp.masters) {
        profile.roots.push_back(m);
        layout(m, cursor);
        cursor += static_cast<double>(profile.basins[m].total_count);
        pending.push_back(m);
    }
    while (!pending.empty()) {
        const std::size_t b = pending.back();
        pending.pop_back();
        for (std::size_t c : profile.basins[b].children) {
            layout(c, profile.basins[c].x0);
            pending.push_back(c);
        }
    }
    profile.width = cursor;
    return profile;
}

struct ColorRamp {
    std::string dark = "#08306b";
    std::string light = "#c6dbef";
};

namespace detail {

inline std::array<int, 3> parse_hex_color(const std::string& hex)
{
    if (hex.size() != 7 || hex[0] != '#')
        throw ParameterError("invalid hex color '" + hex + "'");
    std::array<int, 3> rgb{};
    for (int c = 0; c < 3; ++c) {
        int v = 0;
        for (int j = 0; j < 2; ++j) {
            const char ch = hex[1 + 2 * c + j];
            int d;
            if (ch >= '0' && ch <= '9')
                d = ch - '0';
            else if (ch >= 'a' && ch <= 'f')
                d = ch - 'a' + 10;
            else if (ch >= 'A' && ch <= 'F')
                d = ch - 'A' + 10;
            else
                throw ParameterError("invalid hex color '" + hex + "'");
            v = v * 16 + d;
        }
        rgb[c] = v;
    }
    return rgb;
}

inline std::string lerp_hex(const std::string& a, const std::string& b, double t)
{
    const auto ca = parse_hex_color(a);
    const auto cb = parse_hex_color(b);
    char buf[8];
    int out[3];
    for (int c = 0; c < 3; ++c)
        out[c] = static_cast<int>(std::lround(ca[c] + t * (cb[c] - ca[c])));
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", out[0], out[1], out[2]);
    return buf;
}

} // namespace detail

inline bool is_hex_color(const std::string& s)
{
    try {
        detail::parse_hex_color(s);
        return true;
    } catch (const ParameterError&) {
        return false;
    }
}

/// Average loss over each basin's own members (descendants excluded), mapped
/// linearly onto the ramp between the lowest and highest basin averages.
inline LandscapeProfile color_basins(LandscapeProfile profile, const ScalarField& field, const ColorRamp& ramp = {})
{
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (auto& basin : profile.basins) {
        if (basin.members.empty())
            throw Error("basin without members");
        double sum = 0.0;
        for (std::size_t v : basin.members)
            sum += field.value(v);
        basin.avg_loss = sum / static_cast<double>(basin.members.size());
        lo = first ? basin.avg_loss : std::min(lo, basin.avg_loss);
        hi = first ? basin.avg_loss : std::max(hi, basin.avg_loss);
        first = false;
    }
    for (auto& basin : profile.basins) {
        basin.shade = hi > lo ? (basin.avg_loss - lo) / (hi - lo) : 0.0;
        basin.color = detail::lerp_hex(ramp.dark, ramp.light, basin.shade);
    }
    return profile;
}

/// Red markers at each basin's minimum and orange markers where each sub-basin
/// joins its parent.
inline LandscapeProfile annotate_critical_points(LandscapeProfile profile, const MergeTree& tree)
{
    std::vector<std::size_t> basin_of_min(tree.nodes.size(), BranchDecomposition::npos);
    std::vector<std::size_t> basin_of_saddle(tree.nodes.size(), BranchDecomposition::npos);
    for (std::size_t b = 0; b < profile.basins.size(); ++b) {
        basin_of_min[profile.basins[b].minimum_node] = b;
        if (profile.basins[b].parent)
            basin_of_saddle[profile.basins[b].terminal_node] = b;
    }
    profile.markers.clear();
    for (const auto& node : tree.nodes) {
        if (node.kind == NodeKind::minimum) {
            const std::size_t b = basin_of_min[node.id];
            if (b == BranchDecomposition::npos)
                throw ParameterError("tree does not match profile: unknown minimum node");
            profile.markers.push_back({profile.basins[b].center, node.value, MarkerKind::minimum, node.id});
        } else if (node.kind == NodeKind::saddle) {
            const std::size_t b = basin_of_saddle[node.id];
            if (b == BranchDecomposition::npos)
                throw ParameterError("tree does not match profile: unknown saddle node");
            const auto& child = profile.basins[b];
            profile.markers.push_back({(child.x0 + child.x1) / 2.0, node.value, MarkerKind::saddle, node.id});
        }
    }
    return profile;
}

/// Convenience: geometry, colors and markers in one call.
inline LandscapeProfile make_profile(const ScalarField& field, const MergeTree& tree,
                                     const BranchDecomposition& decomp, const ColorRamp& ramp = {})
{
    return annotate_critical_points(color_basins(build_profile(tree, decomp), field, ramp), tree);
}

/// Horizontal extent of the drawn profile at a value cut: the union length of
/// all rectangles whose span contains `value`. Each rectangle covers
/// [y0, y1); a root basin's topmost rectangle extends upward indefinitely.
inline double silhouette_width(const LandscapeProfile& profile, double value)
{
    std::vector<std::pair<double, double>> spans;
    for (std::size_t b = 0; b < profile.basins.size(); ++b) {
        const auto& basin = profile.basins[b];
        for (std::size_t j = 0; j < basin.rects.size(); ++j) {
            const auto& r = basin.rects[j];
            const bool open_top = !basin.parent && j + 1 == basin.rects.size();
            if (r.y0 <= value && (value < r.y1 || open_top))
                spans.emplace_back(r.x0, r.x1);
        }
    }
    std::sort(spans.begin(), spans.end());
    double total = 0.0;
    double cur_lo = 0.0, cur_hi = 0.0;
    bool open = false;
    for (const auto& [a, b] : spans) {
        if (!open || a > cur_hi) {
            if (open)
                total += cur_hi - cur_lo;
            cur_lo = a;
            cur_hi = b;
            open = true;
        } else {
            cur_hi = std::max(cur_hi, b);
        }
    }
    if (open)
        total += cur_hi - cur_lo;
    return total;
}

} // namespace tlp
