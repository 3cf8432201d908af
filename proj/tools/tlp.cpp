// Command-line front end: synth, graph, tree, profile, render, pipeline.

#include <tlp/tlp.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Options {
    std::string config;
    std::string input;
    std::string format;
    std::size_t k = 0;
    std::string method = "auto";
    std::size_t exact_threshold = 50000;
    std::size_t nn_iterations = 20;
    double sample_rate = 0.5;
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    double relative_epsilon = 0.0;
    std::string svg, json, tree, graph;
    int width = 960, height = 540;
    bool no_axis = false;
    bool sqrt_width = false;
    std::string ramp_dark, ramp_light;
};

void add_analysis_flags(CLI::App* app, Options& o)
{
    app->add_option("--config", o.config, "JSON config file; explicit flags override it");
    app->add_option("-i,--input", o.input, "Field file (.csv or TLPF binary)");
    app->add_option("--format", o.format, "Field format: csv or binary (default: by extension)");
    app->add_option("-k,--k", o.k, "Neighbors per point (default 4 x n)");
    app->add_option("--method", o.method, "kNN method: auto, exact or nn_descent");
    app->add_option("--exact-threshold", o.exact_threshold, "auto uses exact kNN up to this many points");
    app->add_option("--nn-iterations", o.nn_iterations, "NN-Descent iteration cap");
    app->add_option("--sample-rate", o.sample_rate, "NN-Descent sampling rate in (0, 1]");
    app->add_option("--seed", o.seed, "Random seed");
    app->add_option("--epsilon", o.epsilon, "Absolute simplification threshold");
    app->add_option("--relative-epsilon", o.relative_epsilon,
                    "Simplification threshold as a fraction of the value range");
}

tlp::PipelineConfig make_config(const CLI::App* app, const Options& o)
{
    tlp::PipelineConfig cfg;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in)
            throw tlp::PipelineError("parse", "cannot open config '" + o.config + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw tlp::PipelineError("parse", std::string("malformed config: ") + e.what());
        }
        cfg = tlp::config_from_json(j);
    }
    auto given = [&](const char* name) { return app->get_option_no_throw(name) && app->count(name) > 0; };
    if (given("--input"))
        cfg.input = o.input;
    if (given("--format"))
        cfg.format = tlp::parse_format_name(o.format);
    if (given("--k"))
        cfg.k = o.k;
    if (given("--method"))
        cfg.method = tlp::parse_knn_choice(o.method);
    if (given("--exact-threshold"))
        cfg.exact_threshold = o.exact_threshold;
    if (given("--nn-iterations"))
        cfg.nn_iterations = o.nn_iterations;
    if (given("--sample-rate"))
        cfg.sample_rate = o.sample_rate;
    if (given("--seed"))
        cfg.seed = o.seed;
    if (given("--epsilon"))
        cfg.epsilon = o.epsilon;
    if (given("--relative-epsilon"))
        cfg.relative_epsilon = o.relative_epsilon;
    if (given("--svg"))
        cfg.svg_out = o.svg;
    if (given("--json"))
        cfg.json_out = o.json;
    if (given("--tree"))
        cfg.tree_out = o.tree;
    if (given("--graph-out"))
        cfg.graph_out = o.graph;
    if (given("--width"))
        cfg.style.width = o.width;
    if (given("--height"))
        cfg.style.height = o.height;
    if (given("--no-axis"))
        cfg.style.axis = false;
    if (given("--sqrt-width"))
        cfg.style.width_scale = tlp::WidthScale::sqrt;
    if (given("--ramp-dark"))
        cfg.style.ramp.dark = o.ramp_dark;
    if (given("--ramp-light"))
        cfg.style.ramp.light = o.ramp_light;
    if (cfg.input.empty())
        throw tlp::PipelineError("parse", "no input field given (--input or config \"input\")");
    return cfg;
}

tlp::ScalarField load(const tlp::PipelineConfig& cfg)
{
    try {
        return tlp::parse_field(cfg.input, cfg.format.value_or(tlp::format_from_path(cfg.input)));
    } catch (const tlp::Error& e) {
        throw tlp::PipelineError("parse", e.what());
    }
}

void write_or_print(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw tlp::PipelineError("render", "cannot open '" + path + "' for writing");
    out << text;
}

tlp::Well parse_well(const std::string& spec)
{
    // center as comma list, then :depth:width
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw tlp::ParameterError("well spec must look like 'x,y,...:depth:width', got '" + spec + "'");
    tlp::Well w;
    std::stringstream cs(spec.substr(0, c1));
    std::string part;
    while (std::getline(cs, part, ','))
        w.center.push_back(std::stod(part));
    w.depth = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    w.width = std::stod(spec.substr(c2 + 1));
    return w;
}

int fail(const std::string& stage, const std::string& message)
{
    nlohmann::json err = {{"error", message}, {"stage", stage}};
    std::cerr << err.dump() << '\n';
    return 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Topological landscape profiles for sampled loss landscapes"};
    app.require_subcommand(1);

    // synth
    std::size_t dims = 2, resolution = 41;
    std::vector<std::string> wells;
    double baseline = 0.0;
    std::string synth_out, synth_format;
    auto* synth = app.add_subcommand("synth", "Write a synthetic Gaussian-well field");
    synth->add_option("-n,--dims", dims, "Subspace dimension count");
    synth->add_option("-r,--resolution", resolution, "Samples per dimension");
    synth->add_option("--well", wells, "Well as 'x,y,...:depth:width' in grid units")->required();
    synth->add_option("--baseline", baseline, "Constant offset");
    synth->add_option("-o,--out", synth_out, "Output field path")->required();
    synth->add_option("--format", synth_format, "csv or binary (default: by extension)");

    Options graph_o, tree_o, profile_o, pipe_o;
    std::string graph_in;

    auto* graph = app.add_subcommand("graph", "Build the mutual kNN graph and dump it as an edge list");
    add_analysis_flags(graph, graph_o);
    graph->add_option("-o,--out", graph_o.graph, "Edge-list output (default stdout)");

    auto* tree = app.add_subcommand("tree", "Compute the merge tree and dump it as JSON");
    add_analysis_flags(tree, tree_o);
    tree->add_option("--graph", graph_in, "Use a previously dumped edge list instead of building one");
    tree->add_option("-o,--out", tree_o.tree, "Tree JSON output (default stdout)");

    auto* profile = app.add_subcommand("profile", "Compute the landscape profile JSON");
    add_analysis_flags(profile, profile_o);
    profile->add_option("-o,--out", profile_o.json, "Profile JSON output (default stdout)");

    std::string render_in, render_out;
    int render_w = 960, render_h = 540;
    bool render_no_axis = false, render_sqrt = false;
    auto* render = app.add_subcommand("render", "Render a profile JSON document to SVG");
    render->add_option("-i,--profile", render_in, "Profile JSON input")->required();
    render->add_option("-o,--out", render_out, "SVG output (default stdout)");
    render->add_option("--width", render_w, "Canvas width in pixels");
    render->add_option("--height", render_h, "Canvas height in pixels");
    render->add_flag("--no-axis", render_no_axis, "Omit the value axis");
    render->add_flag("--sqrt-width", render_sqrt, "Square-root horizontal scale");

    auto* pipeline = app.add_subcommand("pipeline", "Run field -> graph -> tree -> profile -> SVG/JSON");
    add_analysis_flags(pipeline, pipe_o);
    pipeline->add_option("--svg", pipe_o.svg, "SVG output path");
    pipeline->add_option("--json", pipe_o.json, "Profile JSON output path");
    pipeline->add_option("--tree", pipe_o.tree, "Merge tree JSON output path");
    pipeline->add_option("--graph-out", pipe_o.graph, "Edge-list output path");
    pipeline->add_option("--width", pipe_o.width, "Canvas width in pixels");
    pipeline->add_option("--height", pipe_o.height, "Canvas height in pixels");
    pipeline->add_flag("--no-axis", pipe_o.no_axis, "Omit the value axis");
    pipeline->add_flag("--sqrt-width", pipe_o.sqrt_width, "Square-root horizontal scale");
    pipeline->add_option("--ramp-dark", pipe_o.ramp_dark, "Color for the lowest average loss");
    pipeline->add_option("--ramp-light", pipe_o.ramp_light, "Color for the highest average loss");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            std::vector<tlp::Well> ws;
            for (const auto& s : wells)
                ws.push_back(parse_well(s));
            const auto field = tlp::synth_wells(dims, resolution, ws, baseline);
            const auto fmt = synth_format.empty() ? tlp::format_from_path(synth_out) : tlp::parse_format_name(synth_format);
            tlp::write_field(field, synth_out, fmt);
            std::cout << nlohmann::json{{"N", field.size()}, {"n", field.dims()}, {"out", synth_out}}.dump() << '\n';
            return 0;
        }
        if (*graph) {
            const auto cfg = make_config(graph, graph_o);
            const auto field = load(cfg);
            tlp::NeighborhoodGraph g;
            try {
                g = tlp::build_graph(field, cfg).second;
            } catch (const tlp::Error& e) {
                throw tlp::PipelineError("graph", e.what());
            }
            std::ostringstream os;
            tlp::write_edge_list(g, os);
            write_or_print(graph_o.graph, os.str());
            return 0;
        }
        if (*tree) {
            auto cfg = make_config(tree, tree_o);
            auto field = load(cfg);
            if (!graph_in.empty()) {
                tlp::NeighborhoodGraph g;
                try {
                    std::ifstream in(graph_in);
                    if (!in)
                        throw tlp::IoError("cannot open graph '" + graph_in + "'");
                    g = tlp::read_edge_list(in);
                } catch (const tlp::Error& e) {
                    throw tlp::PipelineError("graph", e.what());
                }
                try {
                    auto raw = tlp::compute_merge_tree(field, g);
                    auto decomp = tlp::branch_decomposition(raw);
                    const double eps = cfg.relative_epsilon ? tlp::relative_epsilon(raw, *cfg.relative_epsilon)
                                                            : cfg.epsilon;
                    auto simplified = tlp::simplify(raw, decomp, eps);
                    write_or_print(tree_o.tree,
                                   tlp::tree_to_json(simplified, tlp::branch_decomposition(simplified)).dump() + "\n");
                } catch (const tlp::Error& e) {
                    throw tlp::PipelineError("tree", e.what());
                }
                return 0;
            }
            const auto r = tlp::analyze_field(std::move(field), cfg);
            write_or_print(tree_o.tree, tlp::tree_to_json(r.tree, r.decomposition).dump() + "\n");
            return 0;
        }
        if (*profile) {
            const auto cfg = make_config(profile, profile_o);
            const auto r = tlp::analyze_field(load(cfg), cfg);
            write_or_print(profile_o.json, tlp::profile_to_json(r.profile).dump(1) + "\n");
            return 0;
        }
        if (*render) {
            tlp::LandscapeProfile p;
            try {
                std::ifstream in(render_in);
                if (!in)
                    throw tlp::IoError("cannot open profile '" + render_in + "'");
                nlohmann::json j;
                try {
                    in >> j;
                } catch (const nlohmann::json::exception& e) {
                    throw tlp::FormatError(std::string("malformed profile JSON: ") + e.what());
                }
                p = tlp::profile_from_json(j);
            } catch (const tlp::Error& e) {
                throw tlp::PipelineError("parse", e.what());
            }
            tlp::RenderStyle style;
            style.width = render_w;
            style.height = render_h;
            style.axis = !render_no_axis;
            if (render_sqrt)
                style.width_scale = tlp::WidthScale::sqrt;
            tlp::SvgDocument doc;
            try {
                doc = tlp::to_svg(p, style);
            } catch (const tlp::Error& e) {
                throw tlp::PipelineError("render", e.what());
            }
            for (const auto& w : doc.warnings)
                std::cerr << "warning: " << w << '\n';
            write_or_print(render_out, doc.text);
            return 0;
        }
        if (*pipeline) {
            const auto cfg = make_config(pipeline, pipe_o);
            const auto r = tlp::run_pipeline(cfg);
            std::cout << r.summary.dump() << '\n';
            return 0;
        }
    } catch (const tlp::PipelineError& e) {
        return fail(e.stage(), e.what());
    } catch (const tlp::Error& e) {
        return fail("config", e.what());
    } catch (const std::exception& e) {
        return fail("config", e.what());
    }
    return 0;
}
