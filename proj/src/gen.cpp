#include "tablex/gen.hpp"

#include <array>
#include <cmath>
#include <new>
#include <random>

namespace tablex {

GenFamily parse_family(const std::string& name) {
    if (name == "trilinear_exact") return GenFamily::trilinear_exact;
    if (name == "smooth") return GenFamily::smooth;
    if (name == "shenlike") return GenFamily::shenlike;
    throw TablexError(ErrorCode::BadRequest, "unknown family '" + name + "'");
}

TableSchema default_schema(std::uint32_t n0, std::uint32_t n1, std::uint32_t n2,
                           std::uint32_t nvars) {
    TableSchema s;
    s.axes[0] = {"density", AxisScale::log10, 1e5, 1e15, n0};
    s.axes[1] = {"temperature", AxisScale::log10, 0.1, 100.0, n1};
    s.axes[2] = {"ye", AxisScale::linear, 0.05, 0.55, n2};
    for (std::uint32_t v = 0; v < nvars; ++v) s.variable_names.push_back("var" + std::to_string(v));
    for (std::uint32_t v = 0; v < std::min<std::uint32_t>(8, nvars); ++v) s.selected.push_back(v);
    s.validate();
    return s;
}

TableSchema preset_schema(const std::string& preset) {
    if (preset == "small") return default_schema(220, 180, 50);
    if (preset == "large") return default_schema(440, 360, 130);
    throw TablexError(ErrorCode::BadRequest, "unknown preset '" + preset + "'");
}

namespace {

// Per-variable coefficients, derived only from (seed, var).
std::array<double, 8> var_coeffs(std::uint64_t seed, std::uint32_t var) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + var + 1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::array<double, 8> c;
    for (auto& x : c) x = u(rng);
    return c;
}

double eval(const GenSpec& spec, std::uint32_t var, double u0, double u1, double u2) {
    const auto c = var_coeffs(spec.seed, var);
    switch (spec.family) {
        case GenFamily::trilinear_exact:
            // Coefficients damped so values stay in [0.4, 3.6]: bounded away
            // from zero keeps relative-error comparisons well conditioned.
            return 2.0 + 0.2 * (c[0] + c[1] * u0 + c[2] * u1 + c[3] * u2 + c[4] * u0 * u1 +
                                c[5] * u0 * u2 + c[6] * u1 * u2 + c[7] * u0 * u1 * u2);
        case GenFamily::smooth:
            return 2.0 + std::sin((2.0 + c[0]) * u0 + c[1]) * std::cos((2.0 + c[2]) * u1 + c[3]) *
                             std::sin((2.0 + c[4]) * u2 + c[5]);
        case GenFamily::shenlike:
            // Positive and monotone increasing in density.
            return (1.0 + 0.5 * (c[0] + 1.0)) * std::exp((1.0 + 0.2 * (c[1] + 1.0)) * u0) *
                   (1.0 + 0.3 * (c[2] + 1.0) * u1) * (1.0 + 0.2 * (c[3] + 1.0) * u2);
    }
    return 0.0;
}

}  // namespace

double analytic_value(const GenSpec& spec, std::uint32_t var, const QueryPoint& p) {
    const double u0 = spec.schema.axes[0].unit_coord(p.rho);
    const double u1 = spec.schema.axes[1].unit_coord(p.temp);
    const double u2 = spec.schema.axes[2].unit_coord(p.ye);
    return eval(spec, var, u0, u1, u2);
}

TableBlock generate(const GenSpec& spec) {
    spec.schema.validate();
    TableBlock block;
    block.schema = spec.schema;
    block.row_offset = 0;
    block.stored_rows = spec.schema.axes[0].count;
    const std::uint32_t n0 = spec.schema.axes[0].count;
    const std::uint32_t n1 = spec.schema.axes[1].count;
    const std::uint32_t n2 = spec.schema.axes[2].count;
    const std::size_t per_var = spec.schema.nodes_per_variable();
    const std::uint64_t need = std::uint64_t(per_var) * spec.schema.variable_names.size() * 8;
    try {
        for (std::uint32_t v = 0; v < spec.schema.variable_names.size(); ++v) {
            std::vector<double> vals(per_var);
            std::size_t idx = 0;
            for (std::uint32_t i = 0; i < n0; ++i) {
                const double u0 = double(i) / (n0 - 1);
                for (std::uint32_t j = 0; j < n1; ++j) {
                    const double u1 = double(j) / (n1 - 1);
                    for (std::uint32_t k = 0; k < n2; ++k)
                        vals[idx++] = eval(spec, v, u0, u1, double(k) / (n2 - 1));
                }
            }
            block.data.push_back(std::move(vals));
        }
    } catch (const std::bad_alloc&) {
        throw TablexError(ErrorCode::GenTooLarge,
                          "table needs " + std::to_string(need) + " bytes");
    }
    return block;
}

}  // namespace tablex
