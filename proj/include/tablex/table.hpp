#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tablex/error.hpp"

namespace tablex {

enum class AxisScale : std::uint8_t { linear = 0, log10 = 1 };

// One axis of the regular 3-D grid. For log10 axes the grid is regular in
// log10 of the physical coordinate.
struct AxisSpec {
    std::string name;
    AxisScale scale = AxisScale::linear;
    double lo = 0.0;
    double hi = 1.0;
    std::uint32_t count = 2;

    void validate() const;

    // Regular-space endpoints and spacing.
    double reg_lo() const;
    double reg_hi() const;
    double step() const { return (reg_hi() - reg_lo()) / (count - 1); }

    double to_regular(double x) const;
    double from_regular(double u) const;

    // Physical coordinate of grid node i.
    double node(std::uint32_t i) const { return from_regular(reg_lo() + i * step()); }

    // Normalized regular coordinate in [0,1]; used by the table generators.
    double unit_coord(double x) const {
        return (to_regular(x) - reg_lo()) / (reg_hi() - reg_lo());
    }
};

struct TableSchema {
    std::array<AxisSpec, 3> axes;  // density, temperature, electron fraction
    std::vector<std::string> variable_names;
    std::vector<std::uint32_t> selected;  // variable indices answered to queries

    void validate() const;
    std::size_t nodes_per_variable() const {
        return std::size_t(axes[0].count) * axes[1].count * axes[2].count;
    }
    bool operator==(const TableSchema& other) const;
};

struct QueryPoint {
    double rho = 0.0;
    double temp = 0.0;
    double ye = 0.0;
};

struct CellLocation {
    std::array<std::uint32_t, 3> base{};  // (i,j,k)
    std::array<double, 3> frac{};         // each in [0,1]
};

// A contiguous set of axis-0 rows of the table, one array per variable,
// row-major with axis 2 fastest-varying. row_offset is 0 for a monolithic
// table and the first stored global row for a partition slice.
struct TableBlock {
    TableSchema schema;
    std::uint32_t row_offset = 0;
    std::uint32_t stored_rows = 0;
    std::vector<std::vector<double>> data;  // [variable][row-major values]

    std::size_t values_per_row() const {
        return std::size_t(schema.axes[1].count) * schema.axes[2].count;
    }
    double at(std::uint32_t var, std::uint32_t gi, std::uint32_t j, std::uint32_t k) const {
        const std::size_t li = gi - row_offset;
        return data[var][(li * schema.axes[1].count + j) * schema.axes[2].count + k];
    }
};

struct AxisCell {
    std::uint32_t index = 0;
    double frac = 0.0;
};

// O(1) cell lookup in the axis's regular coordinate. x == hi maps to the
// last cell with frac 1.0. Out-of-range throws; no silent clamping.
AxisCell locate(const AxisSpec& axis, double x, bool clamp = false);

CellLocation locate_point(const TableSchema& schema, const QueryPoint& p, bool clamp = false);

// Trilinear interpolation of the schema's selected variables.
std::vector<double> interpolate_point(const TableBlock& block, const QueryPoint& p,
                                      bool clamp = false);

// Interpolation at an already-located cell (skips the locate step).
void interpolate_at(const TableBlock& block, const CellLocation& loc, double* out);

struct BulkSlot {
    ErrorCode code = ErrorCode::Ok;
    std::vector<double> values;  // empty unless code == Ok
};

// Elementwise interpolate_point; never aborts on the first bad point.
std::vector<BulkSlot> interpolate_bulk(const TableBlock& block,
                                       const std::vector<QueryPoint>& points);

// Table file IO ("TBLX" format, little-endian). Only monolithic blocks are
// written; slices never hit disk.
void write_table(const TableBlock& block, const std::string& path);
TableBlock read_table(const std::string& path);

// Reads only global rows [row_lo, row_hi) of each variable, seeking past the
// rest. The result has row_offset = row_lo.
TableBlock read_table_rows(const std::string& path, std::uint32_t row_lo, std::uint32_t row_hi);

// Expected on-disk size in bytes for a schema, from the format definition.
std::uint64_t table_file_size(const TableSchema& schema);

}  // namespace tablex
