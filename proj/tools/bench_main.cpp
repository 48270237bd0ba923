// Benchmark harness: future overhead, shared-memory weak scaling, and
// distributed strong scaling; emits CSV.

#include <cstdio>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "tablex/bench.hpp"

using namespace tablex;

namespace {

template <typename T>
std::vector<T> parse_list(const std::string& s) {
    std::vector<T> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(T(std::stod(tok)));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"table engine benchmarks"};
    app.require_subcommand(1);
    std::string out = "results.csv";
    app.add_option("--out", out, "CSV output path");

    auto* overhead = app.add_subcommand("overhead", "future overhead vs threads/workload");
    OverheadParams op;
    std::string ov_workloads = "0,14,50", ov_threads = "1";
    overhead->add_option("--futures", op.futures, "futures per trial");
    overhead->add_option("--workloads", ov_workloads, "workloads in us, comma separated");
    overhead->add_option("--threads", ov_threads, "worker counts, comma separated");
    overhead->add_option("--trials", op.trials, "trials per combination");

    auto* weak = app.add_subcommand("weak", "shared-table weak scaling with overlap");
    WeakParams wp;
    std::string wk_workloads = "0,14,50", wk_workers;
    weak->add_option("--queries", wp.queries_per_worker, "queries per worker");
    weak->add_option("--workloads", wk_workloads, "overlapped workloads in us");
    weak->add_option("--workers", wk_workers, "worker counts, comma separated");
    weak->add_option("--trials", wp.trials, "trials per combination");
    weak->add_option("--seed", wp.seed, "point seed");

    auto* dist = app.add_subcommand("distributed", "non-bulk queries over local localities");
    DistributedParams dp;
    std::string ds_localities = "1,2,4", ds_threads = "1";
    dist->add_option("--table", dp.table_path, "monolithic .tblx file")->required();
    dist->add_option("--bin-dir", dp.bin_dir, "directory with tablex-registry/server");
    dist->add_option("--queries", dp.queries, "query count");
    dist->add_option("--parts", dp.partitions, "partition count");
    dist->add_option("--localities", ds_localities, "locality counts, comma separated");
    dist->add_option("--threads", ds_threads, "server worker counts");
    dist->add_option("--window", dp.window, "outstanding futures cap");
    dist->add_option("--trials", dp.trials, "trials per combination");
    dist->add_option("--seed", dp.seed, "point seed");
    dist->add_flag("--no-verify", "skip the monolithic-oracle verification pass");

    try {
        app.parse(argc, argv);
        std::vector<BenchmarkRecord> records;
        if (*overhead) {
            op.workloads_us = parse_list<double>(ov_workloads);
            op.threads = parse_list<unsigned>(ov_threads);
            records = bench_future_overhead(op);
        } else if (*weak) {
            wp.workloads_us = parse_list<double>(wk_workloads);
            if (wk_workers.empty()) {
                const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
                for (unsigned w = 1; w <= hw; w *= 2) wp.workers.push_back(w);
                if (wp.workers.back() != hw) wp.workers.push_back(hw);
            } else {
                wp.workers = parse_list<unsigned>(wk_workers);
            }
            records = bench_shared_weak(wp);
        } else if (*dist) {
            dp.localities = parse_list<unsigned>(ds_localities);
            dp.threads = parse_list<unsigned>(ds_threads);
            dp.verify = dist->count("--no-verify") == 0;
            if (dp.bin_dir.empty()) dp.bin_dir = self_exe_dir();
            records = bench_distributed(dp);
        }
        emit_csv(records, out);
        std::printf("wrote %zu records to %s\n", records.size(), out.c_str());
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const TablexError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
