#pragma once

#include "field.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace tlp {

enum class FieldFormat { csv, binary };

inline FieldFormat format_from_path(const std::filesystem::path& path)
{
    const auto ext = path.extension().string();
    if (ext == ".csv" || ext == ".CSV")
        return FieldFormat::csv;
    return FieldFormat::binary;
}

inline FieldFormat parse_format_name(std::string_view name)
{
    if (name == "csv")
        return FieldFormat::csv;
    if (name == "binary" || name == "tlpf")
        return FieldFormat::binary;
    throw ParameterError("unknown field format '" + std::string(name) + "'");
}

namespace detail {

inline constexpr std::array<char, 4> tlpf_magic = {'T', 'L', 'P', 'F'};
inline constexpr std::uint16_t tlpf_version = 1;
// Reserved provenance key carrying GridSpec::scale through the binary format.
inline constexpr const char* grid_scale_key = "_grid_scale";

class ByteWriter {
public:
    explicit ByteWriter(std::ostream& out) : out_(out) {}

    template<typename U>
    void put_uint(U value)
    {
        std::array<char, sizeof(U)> bytes;
        for (std::size_t i = 0; i < sizeof(U); ++i)
            bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
        out_.write(bytes.data(), bytes.size());
    }

    void put_double(double v) { put_uint(std::bit_cast<std::uint64_t>(v)); }
    void put_bytes(std::string_view s) { out_.write(s.data(), static_cast<std::streamsize>(s.size())); }

private:
    std::ostream& out_;
};

class ByteReader {
public:
    explicit ByteReader(std::istream& in) : in_(in) {}

    template<typename U>
    U get_uint(const char* what)
    {
        std::array<unsigned char, sizeof(U)> bytes;
        if (!in_.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
            throw FormatError(std::string("truncated TLPF file while reading ") + what);
        U value = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i)
            value |= static_cast<U>(bytes[i]) << (8 * i);
        return value;
    }

    double get_double(const char* what) { return std::bit_cast<double>(get_uint<std::uint64_t>(what)); }

    std::string get_bytes(std::size_t n, const char* what)
    {
        std::string s(n, '\0');
        if (n && !in_.read(s.data(), static_cast<std::streamsize>(n)))
            throw FormatError(std::string("truncated TLPF file while reading ") + what);
        return s;
    }

private:
    std::istream& in_;
};

inline std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        auto cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t'))
            cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
            cell.remove_suffix(1);
        out.push_back(cell);
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

inline std::string where(std::size_t row, std::size_t line)
{
    return "row " + std::to_string(row) + " (line " + std::to_string(line) + ")";
}

/// `row` counts data rows from 1; `line` is the physical line in the file.
inline double parse_double(std::string_view cell, std::size_t row, std::size_t line)
{
    // strtod accepts "nan"/"inf" so the finite check below can name the row.
    std::string tmp(cell);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size())
        throw FormatError("malformed number '" + tmp + "' at " + where(row, line));
    if (!std::isfinite(v))
        throw FormatError("non-finite value '" + tmp + "' at " + where(row, line));
    return v;
}

/// Recognizes a CSV whose points are exactly the row-major lattice.
inline std::optional<GridSpec> infer_grid(std::size_t dims, const std::vector<double>& coords, std::size_t count)
{
    if (count < 2)
        return std::nullopt;
    const double r_est = std::round(std::pow(static_cast<double>(count), 1.0 / static_cast<double>(dims)));
    if (r_est < 2)
        return std::nullopt;
    GridSpec spec{dims, static_cast<std::size_t>(r_est), std::nullopt};
    try {
        if (spec.point_count() != count)
            return std::nullopt;
    } catch (const SizeError&) {
        return std::nullopt;
    }
    if (coords != generate_grid(spec))
        return std::nullopt;
    return spec;
}

inline ScalarField parse_csv(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos)
            break;
    }
    if (line_no == 0 || line.find_first_not_of(" \t\r") == std::string::npos)
        throw FormatError("empty CSV file: missing header");

    const auto header = split_commas(line);
    if (header.size() < 2 || header.back() != "loss")
        throw FormatError("malformed CSV header: expected alpha_1,...,alpha_n,loss");
    const std::size_t dims = header.size() - 1;
    for (std::size_t d = 0; d < dims; ++d)
        if (header[d] != "alpha_" + std::to_string(d + 1))
            throw FormatError("malformed CSV header: column " + std::to_string(d + 1) + " must be alpha_" +
                              std::to_string(d + 1));

    std::vector<double> coords;
    std::vector<double> values;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        ++row;
        const auto cells = split_commas(line);
        if (cells.size() != dims + 1)
            throw FormatError("dimension mismatch at " + where(row, line_no) + ": expected " +
                              std::to_string(dims + 1) + " columns, found " + std::to_string(cells.size()));
        for (std::size_t d = 0; d < dims; ++d)
            coords.push_back(parse_double(cells[d], row, line_no));
        values.push_back(parse_double(cells[dims], row, line_no));
    }
    auto grid = infer_grid(dims, coords, values.size());
    return ScalarField(dims, std::move(coords), std::move(values), grid);
}

inline void write_csv(const ScalarField& field, std::ostream& out)
{
    for (std::size_t d = 0; d < field.dims(); ++d)
        out << "alpha_" << (d + 1) << ',';
    out << "loss\n";
    char buf[32];
    auto put = [&](double v) {
        const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
        out.write(buf, len);
    };
    for (std::size_t i = 0; i < field.size(); ++i) {
        for (double c : field.point(i)) {
            put(c);
            out << ',';
        }
        put(field.value(i));
        out << '\n';
    }
}

inline ScalarField parse_binary(std::istream& in)
{
    ByteReader r(in);
    const auto magic = r.get_bytes(4, "magic");
    if (magic != std::string_view(tlpf_magic.data(), tlpf_magic.size()))
        throw FormatError("malformed header: missing TLPF magic bytes");
    const auto version = r.get_uint<std::uint16_t>("version");
    if (version != tlpf_version)
        throw FormatError("unsupported TLPF version " + std::to_string(version));
    const auto dims = r.get_uint<std::uint32_t>("dimension count");
    const auto count = r.get_uint<std::uint64_t>("point count");
    const auto grid_flag = r.get_uint<std::uint8_t>("grid flag");
    if (dims == 0)
        throw FormatError("malformed header: dimension count is zero");
    if (grid_flag > 1)
        throw FormatError("malformed header: grid flag must be 0 or 1");

    std::optional<GridSpec> grid;
    if (grid_flag == 1) {
        const auto res = r.get_uint<std::uint32_t>("grid resolution");
        grid = GridSpec{dims, res, std::nullopt};
    }
    if (count > std::numeric_limits<std::size_t>::max() / dims)
        throw SizeError("TLPF point count overflows the index type");

    std::vector<double> coords(static_cast<std::size_t>(count) * dims);
    for (auto& c : coords)
        c = r.get_double("coordinates");
    std::vector<double> values(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = r.get_double("values");
        if (!std::isfinite(values[i]))
            throw FormatError("non-finite loss value at row " + std::to_string(i));
    }
    const auto blob_len = r.get_uint<std::uint64_t>("provenance length");
    const auto blob = r.get_bytes(static_cast<std::size_t>(blob_len), "provenance");

    nlohmann::json provenance = nlohmann::json::object();
    if (!blob.empty()) {
        try {
            provenance = nlohmann::json::parse(blob);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("malformed provenance JSON: ") + e.what());
        }
    }
    if (grid && provenance.is_object() && provenance.contains(grid_scale_key)) {
        grid->scale = provenance[grid_scale_key].get<double>();
        provenance.erase(grid_scale_key);
    }
    return ScalarField(dims, std::move(coords), std::move(values), grid, std::move(provenance));
}

inline void write_binary(const ScalarField& field, std::ostream& out)
{
    ByteWriter w(out);
    w.put_bytes(std::string_view(tlpf_magic.data(), tlpf_magic.size()));
    w.put_uint<std::uint16_t>(tlpf_version);
    w.put_uint<std::uint32_t>(static_cast<std::uint32_t>(field.dims()));
    w.put_uint<std::uint64_t>(field.size());
    w.put_uint<std::uint8_t>(field.grid() ? 1 : 0);
    if (field.grid())
        w.put_uint<std::uint32_t>(static_cast<std::uint32_t>(field.grid()->resolution));
    for (double c : field.coords())
        w.put_double(c);
    for (double v : field.values())
        w.put_double(v);

    nlohmann::json provenance = field.provenance();
    if (field.grid() && field.grid()->scale)
        provenance[grid_scale_key] = *field.grid()->scale;
    const std::string blob = provenance.empty() ? std::string() : provenance.dump();
    w.put_uint<std::uint64_t>(blob.size());
    w.put_bytes(blob);
}

} // namespace detail

inline ScalarField read_field(std::istream& in, FieldFormat format)
{
    return format == FieldFormat::csv ? detail::parse_csv(in) : detail::parse_binary(in);
}

inline void write_field(const ScalarField& field, std::ostream& out, FieldFormat format)
{
    if (format == FieldFormat::csv)
        detail::write_csv(field, out);
    else
        detail::write_binary(field, out);
}

inline ScalarField parse_field(const std::filesystem::path& path, FieldFormat format)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open field file '" + path.string() + "'");
    return read_field(in, format);
}

inline ScalarField parse_field(const std::filesystem::path& path)
{
    return parse_field(path, format_from_path(path));
}

inline void write_field(const ScalarField& field, const std::filesystem::path& path, FieldFormat format)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    write_field(field, out, format);
    out.flush();
    if (!out)
        throw IoError("failed writing field to '" + path.string() + "'");
}

} // namespace tlp
