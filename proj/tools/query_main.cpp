// Point and bulk queries against a deployed table; prints CSV rows.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tablex/client.hpp"

using namespace tablex;

namespace {

void print_row(const QueryPoint& p, const std::vector<double>& values) {
    std::printf("%.17g,%.17g,%.17g", p.rho, p.temp, p.ye);
    for (double v : values) std::printf(",%.17g", v);
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"query a distributed table"};
    std::string registry, point, bulk_file;
    app.add_option("--registry", registry, "registry endpoint")->required();
    app.add_option("--point", point, "single query 'rho,T,Ye'");
    app.add_option("--bulk", bulk_file, "CSV file of rho,T,Ye rows");

    try {
        app.parse(argc, argv);
        TableClient client(registry);
        if (!point.empty()) {
            QueryPoint p;
            if (std::sscanf(point.c_str(), "%lf,%lf,%lf", &p.rho, &p.temp, &p.ye) != 3)
                throw TablexError(ErrorCode::BadRequest, "bad --point '" + point + "'");
            print_row(p, client.query_sync(p));
        }
        if (!bulk_file.empty()) {
            std::ifstream in(bulk_file);
            if (!in) throw TablexError(ErrorCode::IoError, "cannot open '" + bulk_file + "'");
            std::vector<QueryPoint> pts;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                QueryPoint p;
                if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &p.rho, &p.temp, &p.ye) != 3)
                    throw TablexError(ErrorCode::BadRequest, "bad row '" + line + "'");
                pts.push_back(p);
            }
            const BulkOutcome outcome = client.query_bulk_async(pts).read();
            for (std::size_t n = 0; n < pts.size(); ++n) {
                if (outcome.slots[n].code == ErrorCode::Ok)
                    print_row(pts[n], outcome.slots[n].values);
                else
                    std::printf("%.17g,%.17g,%.17g,error=%s\n", pts[n].rho, pts[n].temp,
                                pts[n].ye, error_code_name(outcome.slots[n].code));
            }
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const TablexError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
