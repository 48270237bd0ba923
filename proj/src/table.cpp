#include "tablex/table.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

namespace tablex {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::Ok: return "Ok";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::RowNotResident: return "RowNotResident";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::TruncatedFile: return "TruncatedFile";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::TooManyPartitions: return "TooManyPartitions";
        case ErrorCode::RangeMismatch: return "RangeMismatch";
        case ErrorCode::SchedulerShutdown: return "SchedulerShutdown";
        case ErrorCode::DoubleWrite: return "DoubleWrite";
        case ErrorCode::Truncated: return "Truncated";
        case ErrorCode::UnknownType: return "UnknownType";
        case ErrorCode::LengthOverflow: return "LengthOverflow";
        case ErrorCode::ConnectionClosed: return "ConnectionClosed";
        case ErrorCode::UnknownPid: return "UnknownPid";
        case ErrorCode::NoRoutingStored: return "NoRoutingStored";
        case ErrorCode::ConnectRefused: return "ConnectRefused";
        case ErrorCode::GenTooLarge: return "GenTooLarge";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::BadRequest: return "BadRequest";
    }
    return "Unknown";
}

void AxisSpec::validate() const {
    if (count < 2)
        throw TablexError(ErrorCode::BadRequest, "axis '" + name + "' needs count >= 2");
    if (!(lo < hi))
        throw TablexError(ErrorCode::BadRequest, "axis '" + name + "' needs lo < hi");
    if (scale == AxisScale::log10 && !(lo > 0.0))
        throw TablexError(ErrorCode::BadRequest, "axis '" + name + "' log10 scale needs lo > 0");
}

double AxisSpec::reg_lo() const { return scale == AxisScale::log10 ? std::log10(lo) : lo; }
double AxisSpec::reg_hi() const { return scale == AxisScale::log10 ? std::log10(hi) : hi; }

double AxisSpec::to_regular(double x) const {
    return scale == AxisScale::log10 ? std::log10(x) : x;
}
double AxisSpec::from_regular(double u) const {
    return scale == AxisScale::log10 ? std::pow(10.0, u) : u;
}

void TableSchema::validate() const {
    for (const auto& a : axes) a.validate();
    if (variable_names.empty() || variable_names.size() > 19)
        throw TablexError(ErrorCode::BadRequest, "variable count must be in [1,19]");
    if (selected.empty())
        throw TablexError(ErrorCode::BadRequest, "selected variable set is empty");
    for (auto v : selected)
        if (v >= variable_names.size())
            throw TablexError(ErrorCode::BadRequest, "selected index out of bounds");
}

bool TableSchema::operator==(const TableSchema& other) const {
    for (int a = 0; a < 3; ++a) {
        const AxisSpec &x = axes[a], &y = other.axes[a];
        if (x.name != y.name || x.scale != y.scale || x.lo != y.lo || x.hi != y.hi ||
            x.count != y.count)
            return false;
    }
    return variable_names == other.variable_names && selected == other.selected;
}

AxisCell locate(const AxisSpec& axis, double x, bool clamp) {
    if (x < axis.lo || x > axis.hi || std::isnan(x)) {
        if (!clamp || std::isnan(x))
            throw TablexError(ErrorCode::OutOfRange,
                              "axis '" + axis.name + "' value " + std::to_string(x));
        x = x < axis.lo ? axis.lo : axis.hi;
    }
    const double t = (axis.to_regular(x) - axis.reg_lo()) / axis.step();
    AxisCell c;
    double fi = std::floor(t);
    if (fi > double(axis.count - 2)) fi = double(axis.count - 2);
    if (fi < 0.0) fi = 0.0;
    c.index = std::uint32_t(fi);
    c.frac = t - fi;
    if (c.frac < 0.0) c.frac = 0.0;
    if (c.frac > 1.0) c.frac = 1.0;
    // Snap to exact node coordinates so grid points interpolate bitwise.
    if (x == axis.node(c.index)) c.frac = 0.0;
    else if (x == axis.node(c.index + 1)) c.frac = 1.0;
    return c;
}

CellLocation locate_point(const TableSchema& schema, const QueryPoint& p, bool clamp) {
    const double coords[3] = {p.rho, p.temp, p.ye};
    CellLocation loc;
    for (int a = 0; a < 3; ++a) {
        AxisCell c = locate(schema.axes[a], coords[a], clamp);
        loc.base[a] = c.index;
        loc.frac[a] = c.frac;
    }
    return loc;
}

void interpolate_at(const TableBlock& block, const CellLocation& loc, double* out) {
    const std::uint32_t i = loc.base[0];
    if (i < block.row_offset || i + 1 >= block.row_offset + block.stored_rows)
        throw TablexError(ErrorCode::RowNotResident,
                          "rows " + std::to_string(i) + "," + std::to_string(i + 1) +
                              " not in stored range [" + std::to_string(block.row_offset) + "," +
                              std::to_string(block.row_offset + block.stored_rows) + ")");
    const std::uint32_t li = i - block.row_offset;
    const std::uint32_t j = loc.base[1], k = loc.base[2];
    const double fx = loc.frac[0], fy = loc.frac[1], fz = loc.frac[2];
    const double gx = 1.0 - fx, gy = 1.0 - fy, gz = 1.0 - fz;

    const std::size_t n1 = block.schema.axes[1].count;
    const std::size_t n2 = block.schema.axes[2].count;
    const std::size_t c000 = (li * n1 + j) * n2 + k;
    const std::size_t c010 = c000 + n2;
    const std::size_t c100 = c000 + n1 * n2;
    const std::size_t c110 = c100 + n2;

    const double w000 = gx * gy * gz, w001 = gx * gy * fz;
    const double w010 = gx * fy * gz, w011 = gx * fy * fz;
    const double w100 = fx * gy * gz, w101 = fx * gy * fz;
    const double w110 = fx * fy * gz, w111 = fx * fy * fz;

    std::size_t o = 0;
    for (std::uint32_t v : block.schema.selected) {
        const double* d = block.data[v].data();
        out[o++] = w000 * d[c000] + w001 * d[c000 + 1] + w010 * d[c010] + w011 * d[c010 + 1] +
                   w100 * d[c100] + w101 * d[c100 + 1] + w110 * d[c110] + w111 * d[c110 + 1];
    }
}

std::vector<double> interpolate_point(const TableBlock& block, const QueryPoint& p, bool clamp) {
    CellLocation loc = locate_point(block.schema, p, clamp);
    std::vector<double> out(block.schema.selected.size());
    interpolate_at(block, loc, out.data());
    return out;
}

std::vector<BulkSlot> interpolate_bulk(const TableBlock& block,
                                       const std::vector<QueryPoint>& points) {
    std::vector<BulkSlot> out(points.size());
    for (std::size_t n = 0; n < points.size(); ++n) {
        try {
            out[n].values = interpolate_point(block, points[n]);
        } catch (const TablexError& e) {
            out[n].code = e.code();
        }
    }
    return out;
}

namespace {

constexpr char kMagic[4] = {'T', 'B', 'L', 'X'};
constexpr std::uint32_t kFormatVersion = 1;

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void put_bytes(std::FILE* f, const void* p, std::size_t n) {
    if (std::fwrite(p, 1, n, f) != n)
        throw TablexError(ErrorCode::IoError, "short write");
}
void get_bytes(std::FILE* f, void* p, std::size_t n) {
    if (std::fread(p, 1, n, f) != n)
        throw TablexError(ErrorCode::TruncatedFile, "unexpected end of file");
}

template <typename T>
void put_le(std::FILE* f, T v) {
    // Little-endian host assumed; asserted at build time below.
    put_bytes(f, &v, sizeof(v));
}
template <typename T>
T get_le(std::FILE* f) {
    T v;
    get_bytes(f, &v, sizeof(v));
    return v;
}

static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");

std::uint64_t header_size(const TableSchema& schema) {
    std::uint64_t n = 4 + 4 + 3 * (1 + 8 + 8 + 4) + 4;
    for (const auto& name : schema.variable_names) n += 2 + name.size();
    return n;
}

TableSchema read_header(std::FILE* f) {
    char magic[4];
    get_bytes(f, magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw TablexError(ErrorCode::BadMagic, "not a TBLX file");
    const auto version = get_le<std::uint32_t>(f);
    if (version != kFormatVersion)
        throw TablexError(ErrorCode::VersionMismatch, "format version " + std::to_string(version));
    TableSchema schema;
    const char* axis_names[3] = {"density", "temperature", "ye"};
    for (int a = 0; a < 3; ++a) {
        AxisSpec& ax = schema.axes[a];
        ax.name = axis_names[a];
        const auto s = get_le<std::uint8_t>(f);
        if (s > 1) throw TablexError(ErrorCode::BadRequest, "bad axis scale byte");
        ax.scale = static_cast<AxisScale>(s);
        ax.lo = get_le<double>(f);
        ax.hi = get_le<double>(f);
        ax.count = get_le<std::uint32_t>(f);
    }
    const auto nvars = get_le<std::uint32_t>(f);
    if (nvars == 0 || nvars > 19)
        throw TablexError(ErrorCode::BadRequest, "variable count out of [1,19]");
    for (std::uint32_t v = 0; v < nvars; ++v) {
        const auto len = get_le<std::uint16_t>(f);
        std::string name(len, '\0');
        get_bytes(f, name.data(), len);
        schema.variable_names.push_back(std::move(name));
    }
    for (std::uint32_t v = 0; v < std::min<std::uint32_t>(8, nvars); ++v)
        schema.selected.push_back(v);
    schema.validate();
    return schema;
}

void check_finite(const std::vector<double>& vals, const std::string& var) {
    for (double x : vals)
        if (!std::isfinite(x))
            throw TablexError(ErrorCode::NonFiniteValue, "variable '" + var + "'");
}

}  // namespace

std::uint64_t table_file_size(const TableSchema& schema) {
    return header_size(schema) +
           std::uint64_t(schema.variable_names.size()) * schema.nodes_per_variable() * 8;
}

void write_table(const TableBlock& block, const std::string& path) {
    block.schema.validate();
    if (block.row_offset != 0 || block.stored_rows != block.schema.axes[0].count)
        throw TablexError(ErrorCode::BadRequest, "only monolithic blocks can be written");
    const std::size_t per_var = block.schema.nodes_per_variable();
    if (block.data.size() != block.schema.variable_names.size())
        throw TablexError(ErrorCode::BadRequest, "variable array count mismatch");
    for (const auto& d : block.data)
        if (d.size() != per_var)
            throw TablexError(ErrorCode::BadRequest, "variable array length mismatch");

    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw TablexError(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    put_bytes(f.get(), kMagic, 4);
    put_le<std::uint32_t>(f.get(), kFormatVersion);
    for (const auto& ax : block.schema.axes) {
        put_le<std::uint8_t>(f.get(), static_cast<std::uint8_t>(ax.scale));
        put_le<double>(f.get(), ax.lo);
        put_le<double>(f.get(), ax.hi);
        put_le<std::uint32_t>(f.get(), ax.count);
    }
    put_le<std::uint32_t>(f.get(), std::uint32_t(block.schema.variable_names.size()));
    for (const auto& name : block.schema.variable_names) {
        put_le<std::uint16_t>(f.get(), std::uint16_t(name.size()));
        put_bytes(f.get(), name.data(), name.size());
    }
    for (const auto& d : block.data) put_bytes(f.get(), d.data(), d.size() * 8);
    if (std::fflush(f.get()) != 0) throw TablexError(ErrorCode::IoError, "flush failed");
}

TableBlock read_table(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw TablexError(ErrorCode::IoError, "cannot open '" + path + "'");
    TableBlock block;
    block.schema = read_header(f.get());
    block.row_offset = 0;
    block.stored_rows = block.schema.axes[0].count;
    const std::size_t per_var = block.schema.nodes_per_variable();
    for (std::size_t v = 0; v < block.schema.variable_names.size(); ++v) {
        std::vector<double> vals(per_var);
        get_bytes(f.get(), vals.data(), per_var * 8);
        check_finite(vals, block.schema.variable_names[v]);
        block.data.push_back(std::move(vals));
    }
    return block;
}

TableBlock read_table_rows(const std::string& path, std::uint32_t row_lo, std::uint32_t row_hi) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw TablexError(ErrorCode::IoError, "cannot open '" + path + "'");
    TableBlock block;
    block.schema = read_header(f.get());
    const std::uint32_t n0 = block.schema.axes[0].count;
    if (row_lo >= row_hi || row_hi > n0)
        throw TablexError(ErrorCode::RangeMismatch, "row range out of bounds");
    block.row_offset = row_lo;
    block.stored_rows = row_hi - row_lo;
    const std::size_t row_vals = block.values_per_row();
    const std::uint64_t data_start = header_size(block.schema);
    const std::uint64_t var_bytes = std::uint64_t(n0) * row_vals * 8;
    for (std::size_t v = 0; v < block.schema.variable_names.size(); ++v) {
        const std::uint64_t off = data_start + v * var_bytes + std::uint64_t(row_lo) * row_vals * 8;
        if (fseeko(f.get(), off_t(off), SEEK_SET) != 0)
            throw TablexError(ErrorCode::TruncatedFile, "seek past end of file");
        std::vector<double> vals(std::size_t(block.stored_rows) * row_vals);
        get_bytes(f.get(), vals.data(), vals.size() * 8);
        check_finite(vals, block.schema.variable_names[v]);
        block.data.push_back(std::move(vals));
    }
    return block;
}

}  // namespace tablex
