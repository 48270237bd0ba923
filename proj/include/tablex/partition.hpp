#pragma once

#include <cstdint>
#include <vector>

#include "tablex/table.hpp"

namespace tablex {

// Slab of axis-0 rows. `interior` rows are owned; `stored` adds one upper
// ghost row so the 2x2x2 stencil never leaves the slab.
struct PartitionDescriptor {
    std::uint32_t pid = 0;
    std::uint32_t interior_lo = 0;
    std::uint32_t interior_hi = 0;  // half-open
    std::uint32_t stored_lo = 0;
    std::uint32_t stored_hi = 0;  // half-open
};

struct RoutingMap {
    std::uint32_t n_partitions = 0;
    std::vector<std::uint32_t> boundaries;  // interior lo values plus terminal n0
    std::vector<std::uint32_t> placement;   // pid -> locality id

    bool operator==(const RoutingMap&) const = default;
};

// Near-equal slabs: the first (n0 mod p) partitions get one extra row.
std::vector<PartitionDescriptor> plan_partitions(std::uint32_t n0, std::uint32_t p);

RoutingMap make_routing(const std::vector<PartitionDescriptor>& parts,
                        std::uint32_t n_localities);

// Owner of a query whose axis-0 base cell index is base_i.
std::uint32_t owner_of(const RoutingMap& routing, std::uint32_t base_i);

// Copies the descriptor's stored rows out of a monolithic block.
TableBlock slice_block(const TableBlock& block, const PartitionDescriptor& d);

}  // namespace tablex
