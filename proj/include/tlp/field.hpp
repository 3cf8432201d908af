#pragma once

#include "errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tlp {

/// Regular sampling lattice {0..r-1}^n. Coordinates are in grid units; `scale`
/// converts one grid unit to a parameter-space step.
struct GridSpec {
    std::size_t dims = 1;
    std::size_t resolution = 41;
    std::optional<double> scale{};

    /// Step that makes the lattice span +-0.01 around its center.
    static double default_scale(std::size_t resolution)
    {
        return 0.01 / ((static_cast<double>(resolution) - 1.0) / 2.0);
    }

    double step() const { return scale.value_or(default_scale(resolution)); }

    void validate() const
    {
        if (dims < 1)
            throw ParameterError("grid dimension count must be >= 1");
        if (resolution < 2)
            throw ParameterError("grid resolution must be >= 2");
        if (scale && !(std::isfinite(*scale) && *scale > 0.0))
            throw ParameterError("grid scale must be positive and finite");
        (void)point_count();
    }

    /// r^n, throwing SizeError when it does not fit in std::size_t.
    std::size_t point_count() const
    {
        std::size_t total = 1;
        for (std::size_t d = 0; d < dims; ++d) {
            if (total > std::numeric_limits<std::size_t>::max() / resolution)
                throw SizeError("grid point count r^n overflows the index type");
            total *= resolution;
        }
        return total;
    }

    /// Lattice index of the center point ((r-1)/2, ..., (r-1)/2), rounded down
    /// per axis for even r.
    std::size_t center_index() const
    {
        std::size_t index = 0;
        for (std::size_t d = 0; d < dims; ++d)
            index = index * resolution + (resolution - 1) / 2;
        return index;
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Row-major lattice index of integer coordinates (last axis fastest).
inline std::size_t lattice_index(const GridSpec& spec, std::span<const std::size_t> coords)
{
    std::size_t index = 0;
    for (std::size_t d = 0; d < spec.dims; ++d)
        index = index * spec.resolution + coords[d];
    return index;
}

inline std::vector<std::size_t> lattice_coords(const GridSpec& spec, std::size_t index)
{
    std::vector<std::size_t> coords(spec.dims);
    for (std::size_t d = spec.dims; d-- > 0;) {
        coords[d] = index % spec.resolution;
        index /= spec.resolution;
    }
    return coords;
}

/// All r^n lattice points as a flat row-major N x n array of grid-unit
/// coordinates.
inline std::vector<double> generate_grid(const GridSpec& spec)
{
    spec.validate();
    const std::size_t count = spec.point_count();
    if (count > std::numeric_limits<std::size_t>::max() / spec.dims)
        throw SizeError("coordinate array size overflows the index type");

    std::vector<double> coords(count * spec.dims);
    std::vector<std::size_t> digit(spec.dims, 0);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t d = 0; d < spec.dims; ++d)
            coords[i * spec.dims + d] = static_cast<double>(digit[d]);
        for (std::size_t d = spec.dims; d-- > 0;) {
            if (++digit[d] < spec.resolution)
                break;
            digit[d] = 0;
        }
    }
    return coords;
}

/// N sample points in an n-dimensional subspace with one loss value each.
/// Immutable once constructed; the constructor enforces all invariants.
class ScalarField {
public:
    ScalarField() = default;

    ScalarField(std::size_t dims,
                std::vector<double> coords,
                std::vector<double> values,
                std::optional<GridSpec> grid = std::nullopt,
                nlohmann::json provenance = nlohmann::json::object())
        : dims_(dims)
        , coords_(std::move(coords))
        , values_(std::move(values))
        , grid_(std::move(grid))
        , provenance_(std::move(provenance))
    {
        validate();
    }

    std::size_t dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    std::span<const double> point(std::size_t i) const
    {
        return {coords_.data() + i * dims_, dims_};
    }
    double value(std::size_t i) const { return values_[i]; }

    const std::vector<double>& coords() const noexcept { return coords_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::optional<GridSpec>& grid() const noexcept { return grid_; }
    const nlohmann::json& provenance() const noexcept { return provenance_; }

    friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
    void validate() const
    {
        if (dims_ < 1)
            throw FormatError("field dimension count must be >= 1");
        if (coords_.size() != values_.size() * dims_)
            throw FormatError("coordinate count " + std::to_string(coords_.size()) +
                              " does not match " + std::to_string(values_.size()) + " points x " +
                              std::to_string(dims_) + " dims");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i]))
                throw FormatError("non-finite loss value at row " + std::to_string(i));
            for (std::size_t d = 0; d < dims_; ++d)
                if (!std::isfinite(coords_[i * dims_ + d]))
                    throw FormatError("non-finite coordinate at row " + std::to_string(i));
        }
        if (grid_) {
            grid_->validate();
            if (grid_->dims != dims_)
                throw FormatError("grid dimension does not match field dimension");
            if (grid_->point_count() != values_.size())
                throw FormatError("grid field must hold r^n points");
            if (!is_lattice(*grid_, coords_))
                throw FormatError("grid field coordinates are not the row-major lattice");
        }
        if (!provenance_.is_object())
            throw FormatError("provenance must be a JSON object");
    }

    static bool is_lattice(const GridSpec& spec, const std::vector<double>& coords)
    {
        std::vector<std::size_t> digit(spec.dims, 0);
        const std::size_t count = coords.size() / spec.dims;
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t d = 0; d < spec.dims; ++d)
                if (coords[i * spec.dims + d] != static_cast<double>(digit[d]))
                    return false;
            for (std::size_t d = spec.dims; d-- > 0;) {
                if (++digit[d] < spec.resolution)
                    break;
                digit[d] = 0;
            }
        }
        return true;
    }

    std::size_t dims_ = 1;
    std::vector<double> coords_;
    std::vector<double> values_;
    std::optional<GridSpec> grid_;
    nlohmann::json provenance_ = nlohmann::json::object();
};

/// Builds a full-grid field from values in lattice order.
inline ScalarField make_grid_field(const GridSpec& spec,
                                   std::vector<double> values,
                                   nlohmann::json provenance = nlohmann::json::object())
{
    return ScalarField(spec.dims, generate_grid(spec), std::move(values), spec, std::move(provenance));
}

/// Gaussian well: contributes -depth * exp(-|x - center|^2 / width^2).
struct Well {
    std::vector<double> center;
    double depth = 1.0;
    double width = 1.0;
};

inline double evaluate_wells(std::span<const Well> wells, double baseline, std::span<const double> x)
{
    double f = baseline;
    for (const auto& w : wells) {
        double r2 = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double t = x[d] - w.center[d];
            r2 += t * t;
        }
        f -= w.depth * std::exp(-r2 / (w.width * w.width));
    }
    return f;
}

/// Euclidean norm of the analytic gradient of the well sum at x.
inline double wells_gradient_norm(std::span<const Well> wells, std::span<const double> x)
{
    std::vector<double> g(x.size(), 0.0);
    for (const auto& w : wells) {
        double r2 = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double t = x[d] - w.center[d];
            r2 += t * t;
        }
        const double w2 = w.width * w.width;
        const double coef = 2.0 * w.depth * std::exp(-r2 / w2) / w2;
        for (std::size_t d = 0; d < x.size(); ++d)
            g[d] += coef * (x[d] - w.center[d]);
    }
    double s = 0.0;
    for (double v : g)
        s += v * v;
    return std::sqrt(s);
}

/// Synthetic test landscape: a sum of Gaussian wells sampled on the full
/// lattice. The analytic value at each well center is recorded in the
/// provenance under "wells".
inline ScalarField synth_wells(std::size_t dims, std::size_t resolution,
                               const std::vector<Well>& wells, double baseline = 0.0)
{
    GridSpec spec{dims, resolution, std::nullopt};
    spec.validate();
    if (wells.empty())
        throw ParameterError("synth_wells requires at least one well");
    for (const auto& w : wells) {
        if (w.center.size() != dims)
            throw ParameterError("well center dimension does not match the grid");
        for (double c : w.center)
            if (!(c >= 0.0 && c <= static_cast<double>(resolution - 1)))
                throw ParameterError("well center lies outside the lattice");
        if (!(w.width > 0.0) || !std::isfinite(w.width))
            throw ParameterError("well width must be positive");
        if (!std::isfinite(w.depth))
            throw ParameterError("well depth must be finite");
    }

    auto coords = generate_grid(spec);
    const std::size_t count = spec.point_count();
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i)
        values[i] = evaluate_wells(wells, baseline, std::span<const double>(coords.data() + i * dims, dims));

    nlohmann::json meta = {{"generator", "synth_wells"}, {"baseline", baseline}};
    meta["wells"] = nlohmann::json::array();
    for (const auto& w : wells)
        meta["wells"].push_back({{"center", w.center},
                                 {"depth", w.depth},
                                 {"width", w.width},
                                 {"analytic_value", evaluate_wells(wells, baseline, w.center)}});

    return ScalarField(dims, std::move(coords), std::move(values), spec, std::move(meta));
}

} // namespace tlp
