#pragma once

#include "errors.hpp"
#include "field.hpp"
#include "field_io.hpp"
#include "json_io.hpp"
#include "landscape_profile.hpp"
#include "merge_tree.hpp"
#include "neighborhood_graph.hpp"
#include "render.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

namespace tlp {

/// Error tagged with the pipeline stage that raised it
/// (parse, graph, tree, profile, render).
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& message)
        : Error(stage + ": " + message)
        , stage_(std::move(stage))
    {
    }
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

enum class KnnChoice { automatic, exact, nn_descent };

struct PipelineConfig {
    std::filesystem::path input;
    std::optional<FieldFormat> format;
    /// 0 selects 4 x n.
    std::size_t k = 0;
    KnnChoice method = KnnChoice::automatic;
    std::size_t exact_threshold = 50000;
    std::size_t nn_iterations = 20;
    double sample_rate = 0.5;
    std::uint64_t seed = 0;
    /// Absolute simplification threshold; ignored when relative_epsilon is set.
    double epsilon = 0.0;
    std::optional<double> relative_epsilon;
    std::optional<std::filesystem::path> svg_out;
    std::optional<std::filesystem::path> json_out;
    std::optional<std::filesystem::path> tree_out;
    std::optional<std::filesystem::path> graph_out;
    RenderStyle style;

    std::size_t effective_k(std::size_t dims) const { return k ? k : 4 * dims; }
};

inline KnnChoice parse_knn_choice(const std::string& s)
{
    if (s == "auto")
        return KnnChoice::automatic;
    if (s == "exact")
        return KnnChoice::exact;
    if (s == "nn_descent" || s == "nndescent")
        return KnnChoice::nn_descent;
    throw ParameterError("unknown knn method '" + s + "' (expected auto, exact or nn_descent)");
}

/// Reads a JSON config; keys mirror PipelineConfig field names.
inline PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig cfg = {})
{
    try {
        if (j.contains("input"))
            cfg.input = j["input"].get<std::string>();
        if (j.contains("format"))
            cfg.format = parse_format_name(j["format"].get<std::string>());
        if (j.contains("k"))
            cfg.k = j["k"].get<std::size_t>();
        if (j.contains("method"))
            cfg.method = parse_knn_choice(j["method"].get<std::string>());
        if (j.contains("exact_threshold"))
            cfg.exact_threshold = j["exact_threshold"].get<std::size_t>();
        if (j.contains("nn_iterations"))
            cfg.nn_iterations = j["nn_iterations"].get<std::size_t>();
        if (j.contains("sample_rate"))
            cfg.sample_rate = j["sample_rate"].get<double>();
        if (j.contains("seed"))
            cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("epsilon"))
            cfg.epsilon = j["epsilon"].get<double>();
        if (j.contains("relative_epsilon"))
            cfg.relative_epsilon = j["relative_epsilon"].get<double>();
        if (j.contains("svg"))
            cfg.svg_out = j["svg"].get<std::string>();
        if (j.contains("json"))
            cfg.json_out = j["json"].get<std::string>();
        if (j.contains("tree"))
            cfg.tree_out = j["tree"].get<std::string>();
        if (j.contains("graph"))
            cfg.graph_out = j["graph"].get<std::string>();
        if (j.contains("style")) {
            const auto& s = j["style"];
            auto& st = cfg.style;
            st.width = s.value("width", st.width);
            st.height = s.value("height", st.height);
            st.margin = s.value("margin", st.margin);
            st.background = s.value("background", st.background);
            st.ramp.dark = s.value("ramp_dark", st.ramp.dark);
            st.ramp.light = s.value("ramp_light", st.ramp.light);
            st.minimum_radius = s.value("minimum_radius", st.minimum_radius);
            st.saddle_radius = s.value("saddle_radius", st.saddle_radius);
            st.axis = s.value("axis", st.axis);
            if (s.value("width_scale", std::string("linear")) == "sqrt")
                st.width_scale = WidthScale::sqrt;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("invalid config: ") + e.what());
    }
    return cfg;
}

struct PipelineResult {
    ScalarField field;
    NeighborLists lists;
    NeighborhoodGraph graph;
    std::size_t components = 0;
    MergeTree tree;
    BranchDecomposition decomposition;
    double epsilon = 0.0;
    LandscapeProfile profile;
    SvgDocument svg;
    nlohmann::json summary;
};

/// Builds the symmetric neighborhood graph, choosing exact kNN below the
/// threshold and NN-Descent above it. k is clamped to N - 1 on tiny fields.
inline std::pair<NeighborLists, NeighborhoodGraph> build_graph(const ScalarField& field, const PipelineConfig& cfg)
{
    if (field.size() < 2)
        return {NeighborLists{field.size(), 0}, make_graph(field.size(), {})};
    const std::size_t k = std::min(cfg.effective_k(field.dims()), field.size() - 1);
    bool use_exact = cfg.method == KnnChoice::exact ||
                     (cfg.method == KnnChoice::automatic && field.size() <= cfg.exact_threshold);
    NeighborLists lists;
    if (use_exact) {
        lists = exact_knn(field, k);
    } else {
        NnDescentParams p;
        p.k = k;
        p.max_iterations = cfg.nn_iterations;
        p.sample_rate = cfg.sample_rate;
        p.seed = cfg.seed;
        lists = nn_descent(field, p);
    }
    auto graph = symmetrize_mutual(lists);
    return {std::move(lists), std::move(graph)};
}

inline nlohmann::json summarize(const PipelineResult& r)
{
    double max_persistence = 0.0;
    for (const auto& p : persistence_pairs(r.decomposition).pairs)
        max_persistence = std::max(max_persistence, p.persistence());
    return {{"N", r.field.size()},
            {"n", r.field.dims()},
            {"k", r.graph.k},
            {"method", to_string(r.graph.method)},
            {"converged", r.lists.converged},
            {"edges", r.graph.edges.size()},
            {"components", r.components},
            {"minima", r.tree.count(NodeKind::minimum)},
            {"saddles", r.tree.count(NodeKind::saddle)},
            {"epsilon", r.epsilon},
            {"max_persistence", max_persistence}};
}

/// Runs the analysis stages on an in-memory field without touching disk.
inline PipelineResult analyze_field(ScalarField field, const PipelineConfig& cfg)
{
    PipelineResult r;
    r.field = std::move(field);
    try {
        auto [lists, graph] = build_graph(r.field, cfg);
        r.lists = std::move(lists);
        r.graph = std::move(graph);
        r.components = connected_components(r.graph).count;
    } catch (const Error& e) {
        throw PipelineError("graph", e.what());
    }
    try {
        auto raw = compute_merge_tree(r.field, r.graph);
        auto raw_decomp = branch_decomposition(raw);
        r.epsilon = cfg.relative_epsilon ? relative_epsilon(raw, *cfg.relative_epsilon) : cfg.epsilon;
        r.tree = simplify(raw, raw_decomp, r.epsilon);
        r.decomposition = r.epsilon > 0.0 ? branch_decomposition(r.tree) : std::move(raw_decomp);
    } catch (const Error& e) {
        throw PipelineError("tree", e.what());
    }
    try {
        r.profile = make_profile(r.field, r.tree, r.decomposition, cfg.style.ramp);
    } catch (const Error& e) {
        throw PipelineError("profile", e.what());
    }
    try {
        r.svg = to_svg(r.profile, cfg.style);
    } catch (const Error& e) {
        throw PipelineError("render", e.what());
    }
    r.summary = summarize(r);
    return r;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

} // namespace detail

/// field file -> graph -> merge tree -> profile -> artifacts. The summary lists
/// the written artifact paths under "outputs".
inline PipelineResult run_pipeline(const PipelineConfig& cfg)
{
    ScalarField field;
    try {
        field = parse_field(cfg.input, cfg.format.value_or(format_from_path(cfg.input)));
    } catch (const Error& e) {
        throw PipelineError("parse", e.what());
    }
    auto r = analyze_field(std::move(field), cfg);
    try {
        nlohmann::json outputs = nlohmann::json::object();
        if (cfg.svg_out) {
            detail::write_text(*cfg.svg_out, r.svg.text);
            outputs["svg"] = cfg.svg_out->string();
        }
        if (cfg.json_out) {
            detail::write_text(*cfg.json_out, profile_to_json(r.profile).dump(1) + "\n");
            outputs["json"] = cfg.json_out->string();
        }
        if (cfg.tree_out) {
            detail::write_text(*cfg.tree_out, tree_to_json(r.tree, r.decomposition).dump() + "\n");
            outputs["tree"] = cfg.tree_out->string();
        }
        if (cfg.graph_out) {
            std::ofstream out(*cfg.graph_out, std::ios::trunc);
            if (!out)
                throw IoError("cannot open '" + cfg.graph_out->string() + "' for writing");
            write_edge_list(r.graph, out);
            outputs["graph"] = cfg.graph_out->string();
        }
        r.summary["outputs"] = std::move(outputs);
        if (!r.svg.warnings.empty())
            r.summary["warnings"] = r.svg.warnings;
    } catch (const Error& e) {
        throw PipelineError("render", e.what());
    }
    return r;
}

} // namespace tlp
