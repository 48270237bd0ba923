#pragma once

#include <cstdint>
#include <string>

#include "tablex/table.hpp"

namespace tablex {

enum class GenFamily { trilinear_exact, smooth, shenlike };

struct GenSpec {
    TableSchema schema;
    GenFamily family = GenFamily::trilinear_exact;
    std::uint64_t seed = 0;
};

GenFamily parse_family(const std::string& name);

// Default schema: density 1e5..1e15 g/cm^3 (log10), temperature 0.1..100 MeV
// (log10), Ye 0.05..0.55 (linear), 19 variables with the first 8 selected.
TableSchema default_schema(std::uint32_t n0, std::uint32_t n1, std::uint32_t n2,
                           std::uint32_t nvars = 19);
TableSchema preset_schema(const std::string& preset);  // "small" or "large"

// Closed-form value of variable `var` at a physical point; the oracle the
// generated tables are sampled from.
double analytic_value(const GenSpec& spec, std::uint32_t var, const QueryPoint& p);

// Samples every variable on the grid. Deterministic given the spec.
TableBlock generate(const GenSpec& spec);

}  // namespace tablex
