#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "tablex/gen.hpp"
#include "tablex/partition.hpp"

using namespace tablex;

TEST_CASE("plan: 220 rows over 32 partitions") {
    auto parts = plan_partitions(220, 32);
    REQUIRE(parts.size() == 32);
    // 220 = 28*7 + 4*6
    for (std::size_t i = 0; i < 28; ++i)
        CHECK(parts[i].interior_hi - parts[i].interior_lo == 7);
    for (std::size_t i = 28; i < 32; ++i)
        CHECK(parts[i].interior_hi - parts[i].interior_lo == 6);
    CHECK(parts.front().interior_lo == 0);
    CHECK(parts.back().interior_hi == 220);
    for (std::size_t i = 1; i < parts.size(); ++i)
        CHECK(parts[i].interior_lo == parts[i - 1].interior_hi);
}

TEST_CASE("plan: single partition covers everything, no ghost") {
    auto parts = plan_partitions(10, 1);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].interior_lo == 0);
    CHECK(parts[0].interior_hi == 10);
    CHECK(parts[0].stored_lo == 0);
    CHECK(parts[0].stored_hi == 10);
}

TEST_CASE("plan: two partitions, one ghost row in the middle") {
    auto parts = plan_partitions(10, 2);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].interior_lo == 0);
    CHECK(parts[0].interior_hi == 5);
    CHECK(parts[0].stored_hi == 6);
    CHECK(parts[1].interior_lo == 5);
    CHECK(parts[1].interior_hi == 10);
    CHECK(parts[1].stored_hi == 10);
}

TEST_CASE("plan: rejects too many partitions") {
    CHECK_THROWS_AS(plan_partitions(10, 10), TablexError);
    CHECK_THROWS_AS(plan_partitions(10, 0), TablexError);
    CHECK_NOTHROW(plan_partitions(10, 9));
}

TEST_CASE("owner_of: boundary base cells use the lower partition's ghost") {
    auto parts = plan_partitions(10, 2);
    auto routing = make_routing(parts, 1);
    CHECK(owner_of(routing, 4) == 0);  // uses ghost row 5
    CHECK(owner_of(routing, 5) == 1);
    CHECK(owner_of(routing, 0) == 0);
    CHECK(owner_of(routing, 8) == 1);
}

TEST_CASE("owner residence: stored rows always cover {i, i+1}") {
    std::mt19937_64 rng(77);
    for (unsigned p : {1u, 2u, 3u, 7u, 32u}) {
        const std::uint32_t n0 = 64;
        auto parts = plan_partitions(n0, p);
        auto routing = make_routing(parts, 3);
        for (int n = 0; n < 10000; ++n) {
            const std::uint32_t base = rng() % (n0 - 1);
            const auto pid = owner_of(routing, base);
            CHECK(parts[pid].stored_lo <= base);
            CHECK(base + 1 < parts[pid].stored_hi);  // rows base and base+1 resident
            CHECK(parts[pid].interior_lo <= base);
            CHECK(base < parts[pid].interior_hi);
        }
        // Totality and uniqueness, exhaustively.
        for (std::uint32_t base = 0; base + 1 < n0; ++base) {
            unsigned owners = 0;
            for (const auto& d : parts)
                if (d.interior_lo <= base && base < d.interior_hi) ++owners;
            CHECK(owners == 1);
            CHECK(owner_of(routing, base) < parts.size());
        }
    }
}

TEST_CASE("slice/ghost/reassembly invariants") {
    GenSpec spec;
    spec.schema = default_schema(20, 6, 5, 3);
    spec.family = GenFamily::smooth;
    spec.seed = 8;
    const TableBlock block = generate(spec);
    auto parts = plan_partitions(20, 6);

    std::vector<TableBlock> slices;
    for (const auto& d : parts) slices.push_back(slice_block(block, d));

    const std::size_t rv = block.values_per_row();
    for (std::size_t pid = 0; pid < parts.size(); ++pid) {
        const auto& d = parts[pid];
        const auto& s = slices[pid];
        CHECK(s.row_offset == d.stored_lo);
        CHECK(s.stored_rows == d.stored_hi - d.stored_lo);
        // Stored rows bitwise equal to source.
        for (std::size_t v = 0; v < block.data.size(); ++v)
            CHECK(s.data[v] == std::vector<double>(block.data[v].begin() + d.stored_lo * rv,
                                                   block.data[v].begin() + d.stored_hi * rv));
    }
    // Ghost row of pid k equals first interior row of pid k+1, bitwise.
    for (std::size_t pid = 0; pid + 1 < parts.size(); ++pid) {
        const auto& s = slices[pid];
        const auto& next = slices[pid + 1];
        for (std::size_t v = 0; v < block.data.size(); ++v) {
            std::vector<double> ghost(s.data[v].end() - rv, s.data[v].end());
            std::vector<double> first(next.data[v].begin(), next.data[v].begin() + rv);
            CHECK(ghost == first);
        }
    }
    // Concatenating interiors reproduces the monolithic block.
    for (std::size_t v = 0; v < block.data.size(); ++v) {
        std::vector<double> rebuilt;
        for (std::size_t pid = 0; pid < parts.size(); ++pid) {
            const auto& d = parts[pid];
            const std::size_t rows = d.interior_hi - d.interior_lo;
            rebuilt.insert(rebuilt.end(), slices[pid].data[v].begin(),
                           slices[pid].data[v].begin() + rows * rv);
        }
        CHECK(rebuilt == block.data[v]);
    }
}

TEST_CASE("owner slice interpolation equals monolithic, bitwise") {
    GenSpec spec;
    spec.schema = default_schema(33, 7, 6, 4);
    spec.family = GenFamily::smooth;
    spec.seed = 4;
    const TableBlock block = generate(spec);
    auto parts = plan_partitions(33, 5);
    auto routing = make_routing(parts, 2);
    std::vector<TableBlock> slices;
    for (const auto& d : parts) slices.push_back(slice_block(block, d));

    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 5000; ++n) {
        double c[3];
        for (int a = 0; a < 3; ++a) {
            const AxisSpec& ax = spec.schema.axes[a];
            c[a] = ax.from_regular(ax.reg_lo() + u(rng) * (ax.reg_hi() - ax.reg_lo()));
            c[a] = std::min(std::max(c[a], ax.lo), ax.hi);
        }
        QueryPoint p{c[0], c[1], c[2]};
        auto loc = locate_point(spec.schema, p);
        const auto pid = owner_of(routing, loc.base[0]);
        CHECK(interpolate_point(slices[pid], p) == interpolate_point(block, p));
    }
}

TEST_CASE("slice_block rejects non-monolithic sources and bad ranges") {
    GenSpec spec;
    spec.schema = default_schema(10, 4, 3, 1);
    const TableBlock block = generate(spec);
    auto parts = plan_partitions(10, 2);
    auto s0 = slice_block(block, parts[0]);
    CHECK_THROWS_AS(slice_block(s0, parts[0]), TablexError);
    PartitionDescriptor bad{0, 0, 12, 0, 12};
    CHECK_THROWS_AS(slice_block(block, bad), TablexError);
}
