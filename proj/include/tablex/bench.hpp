#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tablex/futures.hpp"
#include "tablex/proc.hpp"
#include "tablex/table.hpp"

namespace tablex {

// One trial. The derived metric is recomputable from the raw fields:
//   overhead_us = (wall_time_s * 1e6 - workload_us * count) / count
//   slowdown    = wall_time_s / baseline wall_time_s
struct BenchmarkRecord {
    std::string experiment;
    unsigned os_threads = 1;
    unsigned localities = 1;
    double workload_us = 0.0;
    std::uint64_t futures_or_queries = 0;
    unsigned trial = 0;
    double wall_time_s = 0.0;
    std::optional<double> overhead_us;
    std::optional<double> slowdown;
};

double overhead_from(double wall_time_s, double workload_us, std::uint64_t invoked);

void emit_csv(const std::vector<BenchmarkRecord>& records, const std::string& path);

struct OverheadParams {
    std::uint64_t futures = 100000;
    std::vector<double> workloads_us = {0.0, 14.0, 50.0};
    std::vector<unsigned> threads = {1};
    unsigned trials = 5;
};
std::vector<BenchmarkRecord> bench_future_overhead(const OverheadParams& p);

struct WeakParams {
    std::uint64_t queries_per_worker = 65536;
    std::vector<double> workloads_us = {0.0, 14.0, 50.0};
    std::vector<unsigned> workers = {1, 2, 4};
    unsigned trials = 3;
    std::uint64_t seed = 12345;
    // Table dims; defaults keep the working set well past L3.
    std::uint32_t n0 = 220, n1 = 180, n2 = 50, nvars = 19;
};
std::vector<BenchmarkRecord> bench_shared_weak(const WeakParams& p);

// Registry plus L locality servers as local child processes.
class LocalDeployment {
  public:
    LocalDeployment(const std::string& bin_dir, const std::string& table_path,
                    unsigned localities, unsigned parts, unsigned server_threads = 1);

    const std::string& registry_endpoint() const { return registry_endpoint_; }

  private:
    ChildProcess registry_;
    std::vector<ChildProcess> servers_;
    std::string registry_endpoint_;
};

struct DistributedParams {
    std::string table_path;
    std::string bin_dir;  // where tablex-registry / tablex-server live
    std::uint64_t queries = 16384;
    unsigned partitions = 32;
    std::vector<unsigned> localities = {1, 2, 4};
    std::vector<unsigned> threads = {1};
    unsigned window = 256;  // outstanding futures cap
    unsigned trials = 1;
    std::uint64_t seed = 12345;
    bool verify = true;  // check every result against the monolithic oracle
};
std::vector<BenchmarkRecord> bench_distributed(const DistributedParams& p);

// Uniform random in-range points, reproducible from the seed.
std::vector<QueryPoint> random_points(const TableSchema& schema, std::size_t n,
                                      std::uint64_t seed);

}  // namespace tablex
