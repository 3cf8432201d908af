#pragma once

#include "errors.hpp"
#include "landscape_profile.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace tlp {

enum class WidthScale { linear, sqrt };

struct RenderStyle {
    int width = 960;
    int height = 540;
    int margin = 40;
    std::string background = "#ffffff";
    ColorRamp ramp;
    std::string minimum_color = "#d62728";
    std::string saddle_color = "#ff7f0e";
    double minimum_radius = 4.0;
    double saddle_radius = 3.5;
    bool axis = true;
    /// sqrt compresses wide profiles with a monotone warp of x, which keeps
    /// nesting and disjointness intact.
    WidthScale width_scale = WidthScale::linear;

    void validate() const
    {
        if (width <= 0 || height <= 0)
            throw ParameterError("canvas dimensions must be positive");
        if (margin < 0 || 2 * margin >= width || 2 * margin >= height)
            throw ParameterError("margin leaves no drawing area");
        if (!(minimum_radius > 0.0) || !(saddle_radius > 0.0))
            throw ParameterError("marker radii must be positive");
        for (const auto* c : {&background, &ramp.dark, &ramp.light, &minimum_color, &saddle_color})
            if (!is_hex_color(*c))
                throw ParameterError("invalid hex color '" + *c + "'");
    }
};

struct SvgDocument {
    std::string text;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string fmt_num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    std::string s(buf);
    // Trim trailing zeros so identical geometry always prints identically.
    while (!s.empty() && s.back() == '0')
        s.pop_back();
    if (!s.empty() && s.back() == '.')
        s.pop_back();
    if (s == "-0")
        s = "0";
    return s;
}

inline std::string fmt_value(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace detail

/// Renders the profile: one <rect> per width step, one <circle> per critical
/// point marker. Output is byte-identical for identical inputs.
inline SvgDocument to_svg(const LandscapeProfile& profile, const RenderStyle& style = {})
{
    style.validate();
    SvgDocument doc;
    const double plot_w = style.width - 2.0 * style.margin;
    const double plot_h = style.height - 2.0 * style.margin;
    const double left = style.margin;
    const double top = style.margin;

    const double span = profile.value_max - profile.value_min;
    const bool flat = !(span > 0.0);
    if (flat)
        doc.warnings.push_back("degenerate value range: rendering a flat band");

    const double total = profile.width > 0.0 ? profile.width : 1.0;
    auto map_x = [&](double x) {
        double t = x / total;
        if (style.width_scale == WidthScale::sqrt)
            t = std::sqrt(std::max(0.0, t));
        return left + t * plot_w;
    };
    auto map_y = [&](double v) {
        if (flat)
            return top + plot_h / 2.0;
        return top + (profile.value_max - v) / span * plot_h;
    };
    const double band = flat ? plot_h / 4.0 : 0.0;

    std::string& out = doc.text;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) + "\" height=\"" +
           std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
           std::to_string(style.height) + "\" style=\"background:" + style.background + "\">\n";

    out += "<g class=\"basins\">\n";
    for (std::size_t b = 0; b < profile.basins.size(); ++b) {
        const auto& basin = profile.basins[b];
        const std::string fill = basin.color.empty() ? style.ramp.dark : basin.color;
        for (const auto& r : basin.rects) {
            const double x0 = map_x(r.x0);
            const double x1 = map_x(r.x1);
            double y_top = map_y(r.y1);
            double y_bot = map_y(r.y0);
            if (flat) {
                y_top -= band / 2.0;
                y_bot += band / 2.0;
            }
            // Zero-height steps (e.g. a basin's rim at its top value) stay
            // visible as a one-pixel line.
            const double h = std::max(1.0, y_bot - y_top);
            out += "<rect class=\"step\" data-basin=\"" + std::to_string(b) + "\" x=\"" + detail::fmt_num(x0) +
                   "\" y=\"" + detail::fmt_num(y_bot - h) + "\" width=\"" + detail::fmt_num(x1 - x0) +
                   "\" height=\"" + detail::fmt_num(h) + "\" fill=\"" + fill + "\"/>\n";
        }
    }
    out += "</g>\n";

    if (style.axis) {
        const double ax = left - 8.0;
        out += "<g class=\"axis\" stroke=\"#444444\" font-family=\"sans-serif\" font-size=\"11\">\n";
        out += "<line x1=\"" + detail::fmt_num(ax) + "\" y1=\"" + detail::fmt_num(top) + "\" x2=\"" +
               detail::fmt_num(ax) + "\" y2=\"" + detail::fmt_num(top + plot_h) + "\"/>\n";
        const int ticks = flat ? 1 : 5;
        for (int t = 0; t < ticks; ++t) {
            const double v = flat ? profile.value_min : profile.value_min + span * t / (ticks - 1);
            const double y = map_y(v);
            out += "<line x1=\"" + detail::fmt_num(ax - 4.0) + "\" y1=\"" + detail::fmt_num(y) + "\" x2=\"" +
                   detail::fmt_num(ax) + "\" y2=\"" + detail::fmt_num(y) + "\"/>\n";
            out += "<text x=\"" + detail::fmt_num(ax - 6.0) + "\" y=\"" + detail::fmt_num(y + 4.0) +
                   "\" text-anchor=\"end\" stroke=\"none\" fill=\"#444444\">" + detail::fmt_value(v) + "</text>\n";
        }
        out += "</g>\n";
    }

    out += "<g class=\"markers\">\n";
    for (const auto& m : profile.markers) {
        const bool is_min = m.kind == MarkerKind::minimum;
        out += "<circle class=\"" + std::string(is_min ? "minimum" : "saddle") + "\" cx=\"" +
               detail::fmt_num(map_x(m.x)) + "\" cy=\"" + detail::fmt_num(map_y(m.y)) + "\" r=\"" +
               detail::fmt_num(is_min ? style.minimum_radius : style.saddle_radius) + "\" fill=\"" +
               (is_min ? style.minimum_color : style.saddle_color) + "\"/>\n";
    }
    out += "</g>\n</svg>\n";
    return doc;
}

} // namespace tlp
