#pragma once

#include "errors.hpp"
#include "landscape_profile.hpp"
#include "merge_tree.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace tlp {

inline constexpr int tree_schema_version = 1;
inline constexpr int profile_schema_version = 1;

/// Tree dump: nodes, arcs (child -> parent), branch table and segmentation.
inline nlohmann::json tree_to_json(const MergeTree& tree, const BranchDecomposition& decomp)
{
    using nlohmann::json;
    json doc = {{"format", "tlp.merge_tree"}, {"version", tree_schema_version}};
    json nodes = json::array();
    json arcs = json::array();
    for (const auto& n : tree.nodes) {
        nodes.push_back({{"id", n.id}, {"vertexId", n.vertex}, {"value", n.value}, {"kind", to_string(n.kind)}});
        if (n.parent)
            arcs.push_back({{"child", n.id}, {"parent", *n.parent}});
    }
    json branches = json::array();
    for (std::size_t b = 0; b < decomp.branches.size(); ++b) {
        const auto& br = decomp.branches[b];
        branches.push_back({{"id", b},
                            {"minimumNode", br.minimum_node},
                            {"terminalNode", br.terminal_node},
                            {"parent", br.parent ? json(*br.parent) : json(nullptr)},
                            {"birth", br.birth},
                            {"death", br.death},
                            {"persistence", br.persistence},
                            {"size", br.members.size()},
                            {"component", br.component},
                            {"master", br.master}});
    }
    doc["nodes"] = std::move(nodes);
    doc["arcs"] = std::move(arcs);
    doc["branches"] = std::move(branches);
    doc["segmentation"] = tree.segmentation;
    return doc;
}

inline nlohmann::json profile_to_json(const LandscapeProfile& profile)
{
    using nlohmann::json;
    json doc = {{"format", "tlp.profile"},
                {"version", profile_schema_version},
                {"width", profile.width},
                {"valueRange", {profile.value_min, profile.value_max}},
                {"roots", profile.roots}};
    json basins = json::array();
    for (std::size_t b = 0; b < profile.basins.size(); ++b) {
        const auto& basin = profile.basins[b];
        json rects = json::array();
        for (const auto& r : basin.rects)
            rects.push_back({{"x0", r.x0}, {"x1", r.x1}, {"y0", r.y0}, {"y1", r.y1}});
        basins.push_back({{"id", b},
                          {"minimumNode", basin.minimum_node},
                          {"terminalNode", basin.terminal_node},
                          {"minimumVertex", basin.minimum_vertex},
                          {"parent", basin.parent ? json(*basin.parent) : json(nullptr)},
                          {"children", basin.children},
                          {"side", basin.side},
                          {"bottom", basin.bottom},
                          {"top", basin.top},
                          {"persistence", basin.persistence},
                          {"ownCount", basin.own_count},
                          {"totalCount", basin.total_count},
                          {"x0", basin.x0},
                          {"x1", basin.x1},
                          {"center", basin.center},
                          {"avgLoss", basin.avg_loss},
                          {"shade", basin.shade},
                          {"color", basin.color},
                          {"rects", std::move(rects)}});
    }
    json markers = json::array();
    for (const auto& m : profile.markers)
        markers.push_back({{"x", m.x}, {"y", m.y}, {"kind", to_string(m.kind)}, {"node", m.node}});
    doc["basins"] = std::move(basins);
    doc["markers"] = std::move(markers);
    return doc;
}

/// Reads a profile document back. Member lists are not serialized, so the
/// result carries geometry, colors and markers only.
inline LandscapeProfile profile_from_json(const nlohmann::json& doc)
{
    try {
        if (doc.at("format").get<std::string>() != "tlp.profile")
            throw FormatError("not a tlp.profile document");
        if (doc.at("version").get<int>() != profile_schema_version)
            throw FormatError("unsupported profile version");
        LandscapeProfile p;
        p.width = doc.at("width").get<double>();
        p.value_min = doc.at("valueRange").at(0).get<double>();
        p.value_max = doc.at("valueRange").at(1).get<double>();
        p.roots = doc.at("roots").get<std::vector<std::size_t>>();
        for (const auto& jb : doc.at("basins")) {
            Basin b;
            b.minimum_node = jb.at("minimumNode").get<std::size_t>();
            b.terminal_node = jb.at("terminalNode").get<std::size_t>();
            b.minimum_vertex = jb.at("minimumVertex").get<std::size_t>();
            if (!jb.at("parent").is_null())
                b.parent = jb.at("parent").get<std::size_t>();
            b.children = jb.at("children").get<std::vector<std::size_t>>();
            b.side = jb.at("side").get<int>();
            b.bottom = jb.at("bottom").get<double>();
            b.top = jb.at("top").get<double>();
            b.persistence = jb.at("persistence").get<double>();
            b.own_count = jb.at("ownCount").get<std::size_t>();
            b.total_count = jb.at("totalCount").get<std::size_t>();
            b.x0 = jb.at("x0").get<double>();
            b.x1 = jb.at("x1").get<double>();
            b.center = jb.at("center").get<double>();
            b.avg_loss = jb.at("avgLoss").get<double>();
            b.shade = jb.at("shade").get<double>();
            b.color = jb.at("color").get<std::string>();
            for (const auto& jr : jb.at("rects")) {
                Rect r{jr.at("x0").get<double>(), jr.at("x1").get<double>(), jr.at("y0").get<double>(),
                       jr.at("y1").get<double>()};
                b.rects.push_back(r);
                b.steps.push_back({r.y0, r.x1 - r.x0});
            }
            p.basins.push_back(std::move(b));
        }
        for (const auto& jm : doc.at("markers")) {
            const auto kind = jm.at("kind").get<std::string>();
            if (kind != "minimum" && kind != "saddle")
                throw FormatError("unknown marker kind '" + kind + "'");
            p.markers.push_back({jm.at("x").get<double>(), jm.at("y").get<double>(),
                                 kind == "minimum" ? MarkerKind::minimum : MarkerKind::saddle,
                                 jm.at("node").get<std::size_t>()});
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed profile JSON: ") + e.what());
    }
}

} // namespace tlp
