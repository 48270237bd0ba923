#include "tablex/partition.hpp"

#include <algorithm>

namespace tablex {

std::vector<PartitionDescriptor> plan_partitions(std::uint32_t n0, std::uint32_t p) {
    if (p < 1 || p > n0 - 1 || n0 < 2)
        throw TablexError(ErrorCode::TooManyPartitions,
                          std::to_string(p) + " partitions over " + std::to_string(n0) + " rows");
    const std::uint32_t q = n0 / p;
    const std::uint32_t r = n0 % p;
    std::vector<PartitionDescriptor> parts;
    parts.reserve(p);
    std::uint32_t lo = 0;
    for (std::uint32_t pid = 0; pid < p; ++pid) {
        const std::uint32_t rows = q + (pid < r ? 1 : 0);
        PartitionDescriptor d;
        d.pid = pid;
        d.interior_lo = lo;
        d.interior_hi = lo + rows;
        d.stored_lo = d.interior_lo;
        d.stored_hi = std::min(d.interior_hi + 1, n0);
        parts.push_back(d);
        lo += rows;
    }
    return parts;
}

RoutingMap make_routing(const std::vector<PartitionDescriptor>& parts,
                        std::uint32_t n_localities) {
    RoutingMap m;
    m.n_partitions = std::uint32_t(parts.size());
    for (const auto& d : parts) m.boundaries.push_back(d.interior_lo);
    m.boundaries.push_back(parts.back().interior_hi);
    for (const auto& d : parts) m.placement.push_back(d.pid % std::max(1u, n_localities));
    return m;
}

std::uint32_t owner_of(const RoutingMap& routing, std::uint32_t base_i) {
    // Owner is the partition whose interior contains base_i; its upper ghost
    // row supplies base_i + 1.
    auto it = std::upper_bound(routing.boundaries.begin(), routing.boundaries.end(), base_i);
    if (it == routing.boundaries.begin() || it == routing.boundaries.end() ||
        base_i + 1 >= routing.boundaries.back())
        throw TablexError(ErrorCode::OutOfRange, "base index " + std::to_string(base_i));
    return std::uint32_t(it - routing.boundaries.begin() - 1);
}

TableBlock slice_block(const TableBlock& block, const PartitionDescriptor& d) {
    if (block.row_offset != 0 || block.stored_rows != block.schema.axes[0].count)
        throw TablexError(ErrorCode::RangeMismatch, "source block is not monolithic");
    if (d.stored_hi > block.stored_rows || d.stored_lo >= d.stored_hi)
        throw TablexError(ErrorCode::RangeMismatch, "descriptor exceeds block rows");
    TableBlock out;
    out.schema = block.schema;
    out.row_offset = d.stored_lo;
    out.stored_rows = d.stored_hi - d.stored_lo;
    const std::size_t row_vals = block.values_per_row();
    for (const auto& src : block.data) {
        out.data.emplace_back(src.begin() + d.stored_lo * row_vals,
                              src.begin() + d.stored_hi * row_vals);
    }
    return out;
}

}  // namespace tablex
