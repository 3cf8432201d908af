#include "../oracles.hpp"

#include <tlp/render.hpp>

#include <gtest/gtest.h>

#include <regex>

namespace tlp {
namespace {

LandscapeProfile profile_of(std::vector<double> values)
{
    const std::size_t n = values.size();
    const auto field = oracle::field_from_values(std::move(values));
    const auto tree = compute_merge_tree(field, oracle::path_graph(n));
    const auto decomp = branch_decomposition(tree);
    return make_profile(field, tree, decomp);
}

std::size_t count(const std::string& text, const std::string& needle)
{
    std::size_t c = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
        ++c;
    return c;
}

TEST(Svg, PathProfileElements)
{
    const auto doc = to_svg(profile_of({3, 1, 2, 0, 4}));
    EXPECT_EQ(count(doc.text, "<rect class=\"step\""), 5u);
    EXPECT_EQ(count(doc.text, "<circle class=\"minimum\""), 2u);
    EXPECT_EQ(count(doc.text, "<circle class=\"saddle\""), 1u);
    EXPECT_EQ(count(doc.text, "fill=\"#d62728\""), 2u);
    EXPECT_EQ(count(doc.text, "fill=\"#ff7f0e\""), 1u);
    EXPECT_TRUE(doc.warnings.empty());
    EXPECT_EQ(doc.text.rfind("<?xml", 0), 0u);
    EXPECT_NE(doc.text.find("</svg>\n"), std::string::npos);
}

TEST(Svg, ConstantFieldWarnsAndDrawsBand)
{
    const auto doc = to_svg(profile_of(std::vector<double>(5, 0.25)));
    EXPECT_EQ(count(doc.text, "<rect class=\"step\""), 1u);
    EXPECT_EQ(count(doc.text, "<circle class=\"minimum\""), 1u);
    EXPECT_EQ(count(doc.text, "<circle class=\"saddle\""), 0u);
    ASSERT_EQ(doc.warnings.size(), 1u);
}

TEST(Svg, ByteIdenticalAcrossRuns)
{
    const auto a = to_svg(profile_of({5, 2, 4, 1, 3, 0, 6, 2.5, 7}));
    const auto b = to_svg(profile_of({5, 2, 4, 1, 3, 0, 6, 2.5, 7}));
    EXPECT_EQ(a.text, b.text);
}

TEST(Svg, GeometryStaysOnCanvas)
{
    RenderStyle style;
    style.axis = false;
    const auto doc = to_svg(profile_of({5, 2, 4, 1, 3, 0, 6, 2.5, 7}), style);
    const std::regex rect(R"re(<rect class="step" data-basin="\d+" x="([-\d.]+)" y="([-\d.]+)" width="([-\d.]+)" height="([-\d.]+)")re");
    std::size_t seen = 0;
    for (auto it = std::sregex_iterator(doc.text.begin(), doc.text.end(), rect); it != std::sregex_iterator(); ++it) {
        const double x = std::stod((*it)[1]), y = std::stod((*it)[2]);
        const double w = std::stod((*it)[3]), h = std::stod((*it)[4]);
        EXPECT_GE(x, style.margin - 1e-9);
        EXPECT_LE(x + w, style.width - style.margin + 1e-3);
        EXPECT_GE(y, style.margin - 1.0);
        EXPECT_LE(y + h, style.height - style.margin + 1e-3);
        EXPECT_GE(h, 1.0);
        ++seen;
    }
    EXPECT_GT(seen, 0u);
    EXPECT_EQ(count(doc.text, "class=\"axis\""), 0u);
}

TEST(Svg, SqrtScaleIsMonotone)
{
    RenderStyle style;
    style.width_scale = WidthScale::sqrt;
    const auto doc = to_svg(profile_of({3, 1, 2, 0, 4}), style);
    EXPECT_EQ(count(doc.text, "<rect class=\"step\""), 5u);
}

TEST(Svg, RejectsBadStyle)
{
    const auto p = profile_of({1, 0, 2});
    RenderStyle style;
    style.width = 0;
    EXPECT_THROW(to_svg(p, style), ParameterError);
    style = {};
    style.background = "white";
    EXPECT_THROW(to_svg(p, style), ParameterError);
    style = {};
    style.margin = 400;
    EXPECT_THROW(to_svg(p, style), ParameterError);
}

} // namespace
} // namespace tlp
