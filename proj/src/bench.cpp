#include "tablex/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

#include "tablex/client.hpp"
#include "tablex/gen.hpp"
#include "tablex/net.hpp"
#include "tablex/wire.hpp"

namespace tablex {

using clock_t_ = std::chrono::steady_clock;

static double seconds_since(clock_t_::time_point t0) {
    return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

double overhead_from(double wall_time_s, double workload_us, std::uint64_t invoked) {
    return (wall_time_s * 1e6 - workload_us * double(invoked)) / double(invoked);
}

void emit_csv(const std::vector<BenchmarkRecord>& records, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw TablexError(ErrorCode::IoError, "cannot open '" + path + "'");
    std::fprintf(f,
                 "experiment,os_threads,localities,workload_us,futures_or_queries,"
                 "trial,wall_time_s,overhead_us,slowdown\n");
    for (const auto& r : records) {
        std::fprintf(f, "%s,%u,%u,%.17g,%llu,%u,%.17g,", r.experiment.c_str(), r.os_threads,
                     r.localities, r.workload_us, (unsigned long long)r.futures_or_queries,
                     r.trial, r.wall_time_s);
        if (r.overhead_us) std::fprintf(f, "%.17g", *r.overhead_us);
        std::fprintf(f, ",");
        if (r.slowdown) std::fprintf(f, "%.17g", *r.slowdown);
        std::fprintf(f, "\n");
    }
    if (std::fclose(f) != 0) throw TablexError(ErrorCode::IoError, "close failed");
}

std::vector<QueryPoint> random_points(const TableSchema& schema, std::size_t n,
                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<QueryPoint> pts(n);
    for (auto& p : pts) {
        double c[3];
        for (int a = 0; a < 3; ++a) {
            const AxisSpec& ax = schema.axes[a];
            c[a] = ax.from_regular(ax.reg_lo() + u(rng) * (ax.reg_hi() - ax.reg_lo()));
            if (c[a] < ax.lo) c[a] = ax.lo;
            if (c[a] > ax.hi) c[a] = ax.hi;
        }
        p = {c[0], c[1], c[2]};
    }
    return pts;
}

std::vector<BenchmarkRecord> bench_future_overhead(const OverheadParams& p) {
    calibrate_workload();
    std::vector<BenchmarkRecord> records;
    for (unsigned threads : p.threads) {
        for (double w : p.workloads_us) {
            // Extra unrecorded pass: the first run pays allocator and
            // page-fault warm-up that would otherwise skew trial 0.
            for (unsigned trial = 0; trial < p.trials + 1; ++trial) {
                Scheduler sched({SchedPolicy::local_stealing, threads});
                std::vector<Future<int>> futs;
                futs.reserve(p.futures);
                const auto t0 = clock_t_::now();
                for (std::uint64_t i = 0; i < p.futures; ++i)
                    futs.push_back(sched.spawn_eager([w] {
                        run_calibrated_workload(w);
                        return 0;
                    }));
                for (auto& f : futs) f.read();
                futs.clear();  // destruction is part of the accounted overhead
                const double wall = seconds_since(t0);
                if (trial == 0) continue;  // warm-up pass
                BenchmarkRecord r;
                r.experiment = "overhead";
                r.os_threads = threads;
                r.workload_us = w;
                r.futures_or_queries = p.futures;
                r.trial = trial - 1;
                r.wall_time_s = wall;
                r.overhead_us = overhead_from(wall, w, p.futures);
                records.push_back(std::move(r));
            }
        }
    }
    return records;
}

std::vector<BenchmarkRecord> bench_shared_weak(const WeakParams& p) {
    calibrate_workload();
    GenSpec spec;
    spec.schema = default_schema(p.n0, p.n1, p.n2, p.nvars);
    spec.family = GenFamily::smooth;
    spec.seed = p.seed;
    const TableBlock block = generate(spec);

    auto run_one = [&](unsigned workers, double workload) {
        std::vector<std::thread> threads;
        const auto t0 = clock_t_::now();
        for (unsigned t = 0; t < workers; ++t) {
            threads.emplace_back([&, t] {
                // Each worker gets its own unique random stream.
                auto pts = random_points(block.schema, p.queries_per_worker,
                                         p.seed + 977 * (t + 1));
                std::vector<double> out(block.schema.selected.size());
                for (const auto& q : pts) {
                    const CellLocation loc = locate_point(block.schema, q);
                    interpolate_at(block, loc, out.data());
                    if (workload > 0.0) run_calibrated_workload(workload);
                }
            });
        }
        for (auto& t : threads) t.join();
        return seconds_since(t0);
    };

    std::vector<BenchmarkRecord> records;
    for (double w : p.workloads_us) {
        double baseline = 0.0;
        for (unsigned workers : p.workers) {
            for (unsigned trial = 0; trial < p.trials; ++trial) {
                const double wall = run_one(workers, w);
                if (workers == p.workers.front() && trial == 0) baseline = wall;
                BenchmarkRecord r;
                r.experiment = "weak";
                r.os_threads = workers;
                r.workload_us = w;
                r.futures_or_queries = p.queries_per_worker;
                r.trial = trial;
                r.wall_time_s = wall;
                r.slowdown = wall / baseline;
                records.push_back(std::move(r));
            }
        }
    }
    return records;
}

LocalDeployment::LocalDeployment(const std::string& bin_dir, const std::string& table_path,
                                 unsigned localities, unsigned parts,
                                 unsigned server_threads) {
    registry_ = ChildProcess({bin_dir + "/tablex-registry", "--listen", "127.0.0.1:0"});
    // First stdout line: "listening <endpoint>"
    std::string line = registry_.read_line();
    const auto sp = line.rfind(' ');
    if (line.rfind("listening", 0) != 0 || sp == std::string::npos)
        throw TablexError(ErrorCode::IoError, "registry did not announce endpoint: " + line);
    registry_endpoint_ = line.substr(sp + 1);

    for (unsigned l = 0; l < localities; ++l) {
        servers_.emplace_back(std::vector<std::string>{
            bin_dir + "/tablex-server", "--listen", "127.0.0.1:0", "--registry",
            registry_endpoint_, "--table", table_path, "--pids", "auto", "--locality",
            std::to_string(l), "--localities", std::to_string(localities), "--parts",
            std::to_string(parts), "--threads", std::to_string(server_threads)});
        std::string sline = servers_.back().read_line();
        if (sline.rfind("serving", 0) != 0)
            throw TablexError(ErrorCode::IoError, "server " + std::to_string(l) +
                                                      " failed to start: " + sline);
    }
    // Wait for every pid binding to land.
    Socket reg = tcp_connect(registry_endpoint_);
    for (int attempt = 0; attempt < 500; ++attempt) {
        write_frame(reg.fd(), {MsgType::RESOLVE, 1, pack_resolve(kResolveAll)});
        ParcelMessage rsp = read_frame(reg.fd());
        if (rsp.type == MsgType::RESOLVE && unpack_bindings(rsp.payload).size() >= parts)
            return;
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    throw TablexError(ErrorCode::IoError, "partitions never finished registering");
}

std::vector<BenchmarkRecord> bench_distributed(const DistributedParams& p) {
    std::vector<BenchmarkRecord> records;
    TableBlock oracle;
    if (p.verify) oracle = read_table(p.table_path);

    for (unsigned threads : p.threads) {
        for (unsigned localities : p.localities) {
            LocalDeployment deploy(p.bin_dir, p.table_path, localities, p.partitions, threads);
            TableClient client(deploy.registry_endpoint());
            const auto points = random_points(client.schema(), p.queries, p.seed);

            for (unsigned trial = 0; trial < p.trials; ++trial) {
                std::vector<std::vector<double>> results(points.size());
                std::vector<Future<std::vector<double>>> window;
                std::vector<std::size_t> window_idx;
                const auto t0 = clock_t_::now();
                std::size_t issued = 0;
                while (issued < points.size() || !window.empty()) {
                    while (issued < points.size() && window.size() < p.window) {
                        window.push_back(client.query_async(points[issued]));
                        window_idx.push_back(issued);
                        ++issued;
                    }
                    results[window_idx.front()] = window.front().read();
                    window.erase(window.begin());
                    window_idx.erase(window_idx.begin());
                }
                const double wall = seconds_since(t0);

                if (p.verify) {
                    for (std::size_t n = 0; n < points.size(); ++n) {
                        const auto expect = interpolate_point(oracle, points[n]);
                        if (expect != results[n])
                            throw TablexError(ErrorCode::BadRequest,
                                              "distributed result diverged from monolithic "
                                              "oracle at point " +
                                                  std::to_string(n));
                    }
                }

                BenchmarkRecord r;
                r.experiment = "distributed";
                r.os_threads = threads;
                r.localities = localities;
                r.futures_or_queries = p.queries;
                r.trial = trial;
                r.wall_time_s = wall;
                records.push_back(std::move(r));
            }
        }
    }
    // Slowdown relative to the fewest-localities config at equal threads.
    for (auto& r : records) {
        for (const auto& base : records)
            if (base.experiment == r.experiment && base.os_threads == r.os_threads &&
                base.localities == records.front().localities && base.trial == 0) {
                r.slowdown = r.wall_time_s / base.wall_time_s;
                break;
            }
    }
    return records;
}

}  // namespace tablex
