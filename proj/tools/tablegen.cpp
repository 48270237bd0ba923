// Generates synthetic EOS-shaped table files from analytic families.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "tablex/gen.hpp"

using namespace tablex;

int main(int argc, char** argv) {
    CLI::App app{"synthetic 3-D lookup table generator"};

    std::string preset, dims, family = "trilinear_exact", out, scales;
    std::uint64_t seed = 0;
    std::uint32_t nvars = 19;
    app.add_option("--preset", preset, "grid preset: small (220x180x50) or large (440x360x130)");
    app.add_option("--dims", dims, "explicit grid IxJxK, e.g. 8x8x8");
    app.add_option("--family", family, "trilinear_exact | smooth | shenlike");
    app.add_option("--seed", seed, "coefficient seed");
    app.add_option("--nvars", nvars, "variable count (1..19)");
    app.add_option("--scales", scales, "axis scales, 3 chars of {lin,log} e.g. 'log log lin'");
    app.add_option("--out", out, "output .tblx path")->required();

    try {
        app.parse(argc, argv);
        GenSpec spec;
        if (!preset.empty() && !dims.empty())
            throw TablexError(ErrorCode::BadRequest, "--preset and --dims are exclusive");
        if (!preset.empty()) {
            spec.schema = preset_schema(preset);
            if (nvars != 19) spec.schema = default_schema(spec.schema.axes[0].count,
                                                          spec.schema.axes[1].count,
                                                          spec.schema.axes[2].count, nvars);
        } else if (!dims.empty()) {
            unsigned i = 0, j = 0, k = 0;
            if (std::sscanf(dims.c_str(), "%ux%ux%u", &i, &j, &k) != 3)
                throw TablexError(ErrorCode::BadRequest, "bad --dims '" + dims + "'");
            spec.schema = default_schema(i, j, k, nvars);
        } else {
            throw TablexError(ErrorCode::BadRequest, "need --preset or --dims");
        }
        if (!scales.empty()) {
            std::istringstream ss(scales);
            for (int a = 0; a < 3; ++a) {
                std::string s;
                ss >> s;
                if (s == "lin") spec.schema.axes[a].scale = AxisScale::linear;
                else if (s == "log") spec.schema.axes[a].scale = AxisScale::log10;
                else throw TablexError(ErrorCode::BadRequest, "bad scale '" + s + "'");
            }
            spec.schema.validate();
        }
        spec.family = parse_family(family);
        spec.seed = seed;

        const TableBlock block = generate(spec);
        write_table(block, out);
        std::printf("wrote %s: %ux%ux%u grid, %zu variables, %llu bytes\n", out.c_str(),
                    spec.schema.axes[0].count, spec.schema.axes[1].count,
                    spec.schema.axes[2].count, spec.schema.variable_names.size(),
                    (unsigned long long)table_file_size(spec.schema));
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const TablexError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.code() == ErrorCode::BadRequest ? 2 : 1;
    }
}
