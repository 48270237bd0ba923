#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "doctest.h"
#include "tablex/table.hpp"

using namespace tablex;

namespace {

// Independent brute-force cell search + 8-corner weighted sum. Kept free of
// the library's locate/interpolate path on purpose.
struct OracleAxis {
    AxisScale scale;
    double lo, hi;
    std::uint32_t count;
    double reg(double x) const { return scale == AxisScale::log10 ? std::log10(x) : x; }
    double coord(std::uint32_t i) const {
        const double u = reg(lo) + (reg(hi) - reg(lo)) * double(i) / (count - 1);
        return scale == AxisScale::log10 ? std::pow(10.0, u) : u;
    }
    // Linear scan, no index arithmetic.
    std::pair<std::uint32_t, double> find(double x) const {
        for (std::uint32_t i = 0; i + 2 < count; ++i) {
            if (reg(x) < reg(coord(i + 1)))
                return {i, (reg(x) - reg(coord(i))) / (reg(coord(i + 1)) - reg(coord(i)))};
        }
        const std::uint32_t i = count - 2;
        return {i, (reg(x) - reg(coord(i))) / (reg(coord(i + 1)) - reg(coord(i)))};
    }
};

double oracle_interpolate(const TableBlock& b, std::uint32_t var, const QueryPoint& p) {
    OracleAxis ax[3];
    for (int a = 0; a < 3; ++a)
        ax[a] = {b.schema.axes[a].scale, b.schema.axes[a].lo, b.schema.axes[a].hi,
                 b.schema.axes[a].count};
    const double coords[3] = {p.rho, p.temp, p.ye};
    std::uint32_t base[3];
    double f[3];
    for (int a = 0; a < 3; ++a) std::tie(base[a], f[a]) = ax[a].find(coords[a]);
    double sum = 0.0;
    for (int ci = 0; ci <= 1; ++ci)
        for (int cj = 0; cj <= 1; ++cj)
            for (int ck = 0; ck <= 1; ++ck) {
                const double w = (ci ? f[0] : 1 - f[0]) * (cj ? f[1] : 1 - f[1]) *
                                 (ck ? f[2] : 1 - f[2]);
                sum += w * b.at(var, base[0] + ci, base[1] + cj, base[2] + ck);
            }
    return sum;
}

TableSchema tiny_schema(std::uint32_t n0, std::uint32_t n1, std::uint32_t n2,
                        std::uint32_t nvars = 1) {
    TableSchema s;
    s.axes[0] = {"density", AxisScale::linear, 0.0, 10.0, n0};
    s.axes[1] = {"temperature", AxisScale::linear, 0.0, 1.0, n1};
    s.axes[2] = {"ye", AxisScale::linear, 0.0, 1.0, n2};
    for (std::uint32_t v = 0; v < nvars; ++v) s.variable_names.push_back("v" + std::to_string(v));
    for (std::uint32_t v = 0; v < nvars; ++v) s.selected.push_back(v);
    return s;
}

TableBlock fill_block(const TableSchema& schema,
                      const std::function<double(std::uint32_t, double, double, double)>& f) {
    TableBlock b;
    b.schema = schema;
    b.row_offset = 0;
    b.stored_rows = schema.axes[0].count;
    for (std::uint32_t v = 0; v < schema.variable_names.size(); ++v) {
        std::vector<double> vals;
        for (std::uint32_t i = 0; i < schema.axes[0].count; ++i)
            for (std::uint32_t j = 0; j < schema.axes[1].count; ++j)
                for (std::uint32_t k = 0; k < schema.axes[2].count; ++k)
                    vals.push_back(f(v, double(i) / (schema.axes[0].count - 1),
                                     double(j) / (schema.axes[1].count - 1),
                                     double(k) / (schema.axes[2].count - 1)));
        b.data.push_back(std::move(vals));
    }
    return b;
}

QueryPoint random_point(const TableSchema& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double c[3];
    for (int a = 0; a < 3; ++a) {
        const AxisSpec& ax = s.axes[a];
        c[a] = ax.from_regular(ax.reg_lo() + u(rng) * (ax.reg_hi() - ax.reg_lo()));
        c[a] = std::min(std::max(c[a], ax.lo), ax.hi);
    }
    return {c[0], c[1], c[2]};
}

}  // namespace

TEST_CASE("locate: uniform spacing") {
    AxisSpec ax{"x", AxisScale::linear, 0.0, 10.0, 11};
    auto c = locate(ax, 3.5);
    CHECK(c.index == 3);
    CHECK(c.frac == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("locate: upper boundary maps to last cell with frac 1") {
    AxisSpec ax{"x", AxisScale::linear, 0.0, 10.0, 11};
    auto c = locate(ax, 10.0);
    CHECK(c.index == 9);
    CHECK(c.frac == 1.0);
}

TEST_CASE("locate: exact grid point in log spacing") {
    AxisSpec ax{"x", AxisScale::log10, 1.0, 1e4, 5};
    auto c = locate(ax, 100.0);
    CHECK(c.index == 2);
    CHECK(c.frac == 0.0);
}

TEST_CASE("locate: out of range errors unless clamping requested") {
    AxisSpec ax{"x", AxisScale::linear, 0.0, 10.0, 11};
    CHECK_THROWS_AS(locate(ax, -0.1), TablexError);
    CHECK_THROWS_AS(locate(ax, 10.1), TablexError);
    try {
        locate(ax, 10.1);
    } catch (const TablexError& e) {
        CHECK(e.code() == ErrorCode::OutOfRange);
    }
    CHECK(locate(ax, 10.1, /*clamp=*/true).frac == 1.0);
    CHECK(locate(ax, -5.0, /*clamp=*/true).index == 0);
}

TEST_CASE("locate/reconstruct round trip on both scales") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int scale = 0; scale < 2; ++scale) {
        AxisSpec ax{"x", AxisScale(scale), scale ? 0.5 : -3.0, scale ? 2.5e6 : 7.0,
                    2 + std::uint32_t(rng() % 200)};
        for (int n = 0; n < 2000; ++n) {
            const double x =
                ax.from_regular(ax.reg_lo() + u(rng) * (ax.reg_hi() - ax.reg_lo()));
            if (x < ax.lo || x > ax.hi) continue;
            auto c = locate(ax, x);
            CHECK(c.index <= ax.count - 2);
            CHECK(c.frac >= 0.0);
            CHECK(c.frac <= 1.0);
            const double back = ax.from_regular(ax.reg_lo() + (c.index + c.frac) * ax.step());
            CHECK(back == doctest::Approx(x).epsilon(1e-12));
        }
    }
}

TEST_CASE("locate_point: corners and per-axis composition") {
    TableSchema s = tiny_schema(5, 4, 3);
    auto lo = locate_point(s, {s.axes[0].lo, s.axes[1].lo, s.axes[2].lo});
    CHECK(lo.base == std::array<std::uint32_t, 3>{0, 0, 0});
    CHECK(lo.frac == std::array<double, 3>{0, 0, 0});
    auto hi = locate_point(s, {s.axes[0].hi, s.axes[1].hi, s.axes[2].hi});
    CHECK(hi.base == std::array<std::uint32_t, 3>{3, 2, 1});
    CHECK(hi.frac == std::array<double, 3>{1, 1, 1});

    std::mt19937_64 rng(7);
    for (int n = 0; n < 200; ++n) {
        QueryPoint p = random_point(s, rng);
        auto loc = locate_point(s, p);
        auto cx = locate(s.axes[0], p.rho);
        auto cy = locate(s.axes[1], p.temp);
        auto cz = locate(s.axes[2], p.ye);
        CHECK(loc.base == std::array<std::uint32_t, 3>{cx.index, cy.index, cz.index});
        CHECK(loc.frac == std::array<double, 3>{cx.frac, cy.frac, cz.frac});
    }
    CHECK_THROWS_AS(locate_point(s, {-1.0, 0.5, 0.5}), TablexError);
}

TEST_CASE("interpolation reproduces multilinear tables exactly") {
    TableSchema s = tiny_schema(6, 5, 4);
    auto b = fill_block(s, [](std::uint32_t, double u0, double, double) { return 2.0 + 3.0 * u0; });
    std::mt19937_64 rng(11);
    for (int n = 0; n < 1000; ++n) {
        QueryPoint p = random_point(s, rng);
        const double expect = 2.0 + 3.0 * s.axes[0].unit_coord(p.rho);
        const auto got = interpolate_point(b, p);
        CHECK(got[0] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("grid nodes interpolate to stored values bitwise") {
    TableSchema s = tiny_schema(5, 4, 3, 2);
    s.axes[0].scale = AxisScale::log10;
    s.axes[0].lo = 1e2;
    s.axes[0].hi = 1e6;
    auto b = fill_block(s, [](std::uint32_t v, double u0, double u1, double u2) {
        return std::sin(3 * u0 + v) + std::cos(5 * u1) * u2 + 0.1;
    });
    for (std::uint32_t i = 0; i < s.axes[0].count; ++i)
        for (std::uint32_t j = 0; j < s.axes[1].count; ++j)
            for (std::uint32_t k = 0; k < s.axes[2].count; ++k) {
                QueryPoint p{s.axes[0].node(i), s.axes[1].node(j), s.axes[2].node(k)};
                const auto got = interpolate_point(b, p);
                CHECK(got[0] == b.at(0, i, j, k));
                CHECK(got[1] == b.at(1, i, j, k));
            }
}

TEST_CASE("random smooth table matches the corner-sum oracle") {
    TableSchema s = tiny_schema(9, 8, 7, 3);
    s.axes[1].scale = AxisScale::log10;
    s.axes[1].lo = 0.1;
    s.axes[1].hi = 100.0;
    std::mt19937_64 fill_rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    auto b = fill_block(s, [&](std::uint32_t, double, double, double) { return u(fill_rng); });
    std::mt19937_64 rng(3);
    for (int n = 0; n < 1000; ++n) {
        QueryPoint p = random_point(s, rng);
        const auto got = interpolate_point(b, p);
        for (std::uint32_t v = 0; v < 3; ++v) {
            const double expect = oracle_interpolate(b, v, p);
            CHECK(got[v] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("interpolated values stay within the corner envelope") {
    TableSchema s = tiny_schema(7, 6, 5);
    std::mt19937_64 fill_rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto b = fill_block(s, [&](std::uint32_t, double, double, double) { return u(fill_rng); });
    std::mt19937_64 rng(13);
    for (int n = 0; n < 2000; ++n) {
        QueryPoint p = random_point(s, rng);
        auto loc = locate_point(s, p);
        double mn = 1e300, mx = -1e300;
        for (int ci = 0; ci <= 1; ++ci)
            for (int cj = 0; cj <= 1; ++cj)
                for (int ck = 0; ck <= 1; ++ck) {
                    const double c = b.at(0, loc.base[0] + ci, loc.base[1] + cj, loc.base[2] + ck);
                    mn = std::min(mn, c);
                    mx = std::max(mx, c);
                }
        const auto got = interpolate_point(b, p);
        CHECK(got[0] >= mn - 1e-12);
        CHECK(got[0] <= mx + 1e-12);
    }
}

TEST_CASE("trilinear weights are nonnegative and sum to 1") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 10000; ++n) {
        const double f[3] = {u(rng), u(rng), u(rng)};
        double sum = 0.0;
        for (int ci = 0; ci <= 1; ++ci)
            for (int cj = 0; cj <= 1; ++cj)
                for (int ck = 0; ck <= 1; ++ck) {
                    const double w = (ci ? f[0] : 1 - f[0]) * (cj ? f[1] : 1 - f[1]) *
                                     (ck ? f[2] : 1 - f[2]);
                    CHECK(w >= 0.0);
                    sum += w;
                }
        CHECK(std::abs(sum - 1.0) <= 1e-15);
    }
}

TEST_CASE("bulk interpolation matches the looped oracle and flags bad slots") {
    TableSchema s = tiny_schema(6, 5, 4, 2);
    std::mt19937_64 fill_rng(2);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    auto b = fill_block(s, [&](std::uint32_t, double, double, double) { return u(fill_rng); });

    CHECK(interpolate_bulk(b, {}).empty());

    std::mt19937_64 rng(17);
    std::vector<QueryPoint> pts;
    for (int n = 0; n < 4096; ++n) pts.push_back(random_point(s, rng));
    pts[100] = {-99.0, 0.5, 0.5};  // out of range
    auto slots = interpolate_bulk(b, pts);
    REQUIRE(slots.size() == pts.size());
    for (std::size_t n = 0; n < pts.size(); ++n) {
        if (n == 100) {
            CHECK(slots[n].code == ErrorCode::OutOfRange);
            continue;
        }
        CHECK(slots[n].code == ErrorCode::Ok);
        CHECK(slots[n].values == interpolate_point(b, pts[n]));
    }
}

TEST_CASE("partition slices reject non-resident rows") {
    TableSchema s = tiny_schema(10, 4, 3);
    auto b = fill_block(s, [](std::uint32_t, double u0, double, double) { return u0; });
    TableBlock slice;
    slice.schema = s;
    slice.row_offset = 4;
    slice.stored_rows = 3;  // global rows 4,5,6
    const std::size_t rv = b.values_per_row();
    slice.data.push_back({b.data[0].begin() + 4 * rv, b.data[0].begin() + 7 * rv});
    // base row 4 resident, base row 6 needs row 7
    QueryPoint inside{s.axes[0].node(4), 0.5, 0.5};
    CHECK(interpolate_point(slice, inside) == interpolate_point(b, inside));
    QueryPoint outside{s.axes[0].node(7), 0.5, 0.5};
    CHECK_THROWS_AS(interpolate_point(slice, outside), TablexError);
}

TEST_CASE("table file round trip is bitwise") {
    TableSchema s = tiny_schema(4, 4, 4);
    std::mt19937_64 fill_rng(31);
    std::uniform_real_distribution<double> u(-1e30, 1e30);
    auto b = fill_block(s, [&](std::uint32_t, double, double, double) { return u(fill_rng); });
    const std::string path = "/tmp/tablex_test_roundtrip.tblx";
    write_table(b, path);
    auto r = read_table(path);
    CHECK(r.schema == b.schema);
    CHECK(r.data == b.data);
    std::remove(path.c_str());
}

TEST_CASE("file errors: bad magic, version, truncation, nonfinite") {
    TableSchema s = tiny_schema(4, 4, 4);
    auto b = fill_block(s, [](std::uint32_t, double u0, double, double) { return u0; });
    const std::string path = "/tmp/tablex_test_bad.tblx";
    write_table(b, path);

    auto corrupt = [&](long offset, const char* bytes, std::size_t n) {
        write_table(b, path);
        std::FILE* f = std::fopen(path.c_str(), "r+b");
        std::fseek(f, offset, SEEK_SET);
        std::fwrite(bytes, 1, n, f);
        std::fclose(f);
    };

    corrupt(0, "XXXX", 4);
    CHECK_THROWS_WITH_AS(read_table(path), doctest::Contains("BadMagic"), TablexError);

    const char v9[4] = {9, 0, 0, 0};
    corrupt(4, v9, 4);
    CHECK_THROWS_WITH_AS(read_table(path), doctest::Contains("VersionMismatch"), TablexError);

    write_table(b, path);
    std::FILE* f = std::fopen(path.c_str(), "r+b");
    std::fseek(f, 0, SEEK_END);
    const long sz = std::ftell(f);
    std::fclose(f);
    REQUIRE(truncate(path.c_str(), sz - 16) == 0);
    CHECK_THROWS_WITH_AS(read_table(path), doctest::Contains("TruncatedFile"), TablexError);

    b.data[0][5] = std::nan("");
    write_table(b, path);
    CHECK_THROWS_WITH_AS(read_table(path), doctest::Contains("NonFiniteValue"), TablexError);
    std::remove(path.c_str());
}

TEST_CASE("file size arithmetic for the small preset shape") {
    TableSchema s;
    s.axes[0] = {"density", AxisScale::log10, 1e5, 1e15, 220};
    s.axes[1] = {"temperature", AxisScale::log10, 0.1, 100.0, 180};
    s.axes[2] = {"ye", AxisScale::linear, 0.05, 0.55, 50};
    for (int v = 0; v < 19; ++v) s.variable_names.push_back("var" + std::to_string(v));
    for (int v = 0; v < 8; ++v) s.selected.push_back(v);
    std::uint64_t header = 4 + 4 + 3 * 21 + 4;
    for (const auto& n : s.variable_names) header += 2 + n.size();
    const std::uint64_t expect = header + 19ull * 220 * 180 * 50 * 8;
    CHECK(table_file_size(s) == expect);
    CHECK(expect > 300000000ull);  // ~301 MB raw
}

TEST_CASE("read_table_rows extracts exactly the requested rows") {
    TableSchema s = tiny_schema(10, 3, 4, 2);
    std::mt19937_64 fill_rng(12);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto b = fill_block(s, [&](std::uint32_t, double, double, double) { return u(fill_rng); });
    const std::string path = "/tmp/tablex_test_rows.tblx";
    write_table(b, path);
    auto slice = read_table_rows(path, 3, 7);
    CHECK(slice.row_offset == 3);
    CHECK(slice.stored_rows == 4);
    const std::size_t rv = b.values_per_row();
    for (int v = 0; v < 2; ++v)
        CHECK(slice.data[v] == std::vector<double>(b.data[v].begin() + 3 * rv,
                                                   b.data[v].begin() + 7 * rv));
    CHECK_THROWS_AS(read_table_rows(path, 5, 11), TablexError);
    std::remove(path.c_str());
}
