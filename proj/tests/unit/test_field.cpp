#include "../oracles.hpp"

#include <tlp/field.hpp>

#include <gtest/gtest.h>

#include <random>

namespace tlp {
namespace {

TEST(GenerateGrid, SmallestLattice)
{
    const auto coords = generate_grid({1, 3});
    EXPECT_EQ(coords, (std::vector<double>{0, 1, 2}));
}

TEST(GenerateGrid, RowMajorOrder)
{
    const auto coords = generate_grid({2, 2});
    EXPECT_EQ(coords, (std::vector<double>{0, 0, 0, 1, 1, 0, 1, 1}));
}

TEST(GenerateGrid, Resolution41Center)
{
    const GridSpec spec{3, 41};
    const auto coords = generate_grid(spec);
    ASSERT_EQ(spec.point_count(), 68921u);
    ASSERT_EQ(coords.size(), 68921u * 3);
    const std::size_t center = spec.center_index();
    EXPECT_EQ(center, 68921u / 2);
    EXPECT_EQ(coords[center * 3 + 0], 20.0);
    EXPECT_EQ(coords[center * 3 + 1], 20.0);
    EXPECT_EQ(coords[center * 3 + 2], 20.0);
}

TEST(GenerateGrid, IndexCoordinateBijection)
{
    for (const GridSpec spec : {GridSpec{1, 7}, GridSpec{2, 5}, GridSpec{3, 4}, GridSpec{4, 3}}) {
        const auto coords = generate_grid(spec);
        for (std::size_t i = 0; i < spec.point_count(); ++i) {
            const auto c = lattice_coords(spec, i);
            for (std::size_t d = 0; d < spec.dims; ++d)
                ASSERT_EQ(coords[i * spec.dims + d], static_cast<double>(c[d]));
            ASSERT_EQ(lattice_index(spec, c), i);
        }
    }
}

TEST(GenerateGrid, RejectsInvalidSpecs)
{
    EXPECT_THROW(generate_grid({0, 5}), ParameterError);
    EXPECT_THROW(generate_grid({2, 1}), ParameterError);
    EXPECT_THROW(generate_grid({64, 41}), SizeError);
}

TEST(GridSpec, DefaultScaleSpansOneHundredth)
{
    const GridSpec spec{2, 41};
    EXPECT_DOUBLE_EQ(spec.step() * 20.0, 0.01);
}

TEST(ScalarField, RejectsNonFiniteValues)
{
    EXPECT_THROW(ScalarField(1, {0, 1}, {0.0, std::nan("")}), FormatError);
    EXPECT_THROW(ScalarField(2, {0, 1, 2}, {0.0, 1.0}), FormatError);
}

TEST(ScalarField, GridFieldMustEnumerateLattice)
{
    EXPECT_THROW(ScalarField(1, {0, 2, 1}, {0, 0, 0}, GridSpec{1, 3}), FormatError);
    EXPECT_NO_THROW(ScalarField(1, {0, 1, 2}, {0, 0, 0}, GridSpec{1, 3}));
}

TEST(SynthWells, SingleCenteredWellHasCenterMinimum)
{
    const auto f = synth_wells(2, 21, {{{10, 10}, 1.0, 3.0}});
    const auto it = std::min_element(f.values().begin(), f.values().end());
    EXPECT_EQ(static_cast<std::size_t>(it - f.values().begin()), f.grid()->center_index());
}

TEST(SynthWells, MatchesAnalyticFormula)
{
    const std::vector<Well> wells = {{{3.5, 4, 2}, 1.0, 2.0}, {{8, 1, 6.25}, 0.4, 3.0}};
    const auto f = synth_wells(3, 9, wells, 0.25);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto p = f.point(i);
        double expect = 0.25;
        for (const auto& w : wells) {
            double r2 = 0;
            for (int d = 0; d < 3; ++d)
                r2 += (p[d] - w.center[d]) * (p[d] - w.center[d]);
            expect -= w.depth * std::exp(-r2 / (w.width * w.width));
        }
        ASSERT_NEAR(f.value(i), expect, 1e-12);
    }
    ASSERT_EQ(f.provenance()["wells"].size(), 2u);
}

TEST(SynthWells, TwoSeparatedWellsGiveTwoLocalMinima)
{
    const auto f = synth_wells(2, 21, {{{5, 5}, 1.0, 2.5}, {{15, 14}, 0.5, 2.5}});
    EXPECT_EQ(oracle::lattice_local_minima(f).size(), 2u);
}

std::vector<Well> spread_wells(std::size_t count, std::size_t dims)
{
    // Corners and center of a 21-lattice, well separated relative to width 2.5.
    const std::vector<std::vector<double>> sites3 = {
        {5, 5, 5}, {15, 15, 15}, {5, 15, 10}, {15, 5, 10}, {10, 10, 3}};
    const std::vector<std::vector<double>> sites2 = {{5, 5}, {15, 15}, {5, 15}, {15, 5}, {10, 10}};
    std::vector<Well> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back({dims == 3 ? sites3[i] : sites2[i], 1.0 - 0.15 * static_cast<double>(i), 2.5});
    return out;
}

TEST(SynthWells, KWellsGiveKLocalMinimaIn3D)
{
    for (std::size_t k : {2u, 3u, 5u}) {
        const auto f = synth_wells(3, 21, spread_wells(k, 3));
        EXPECT_EQ(oracle::lattice_local_minima(f).size(), k) << "k = " << k;
    }
}

TEST(SynthWells, RejectsBadParameters)
{
    EXPECT_THROW(synth_wells(2, 21, {}), ParameterError);
    EXPECT_THROW(synth_wells(2, 21, {{{21, 3}, 1.0, 2.0}}), ParameterError);
    EXPECT_THROW(synth_wells(2, 21, {{{2, 3}, 1.0, 0.0}}), ParameterError);
    EXPECT_THROW(synth_wells(2, 21, {{{2, 3, 4}, 1.0, 1.0}}), ParameterError);
}

} // namespace
} // namespace tlp
