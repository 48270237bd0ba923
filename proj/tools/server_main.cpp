// Locality daemon: hosts table partition slices and answers interpolation
// parcels.

#include <csignal>
#include <cstdio>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tablex/server.hpp"

using namespace tablex;

namespace {
LocalityServer* g_server = nullptr;
void on_signal(int) {
    if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"table partition server"};
    ServerConfig cfg;
    std::string pids = "auto", scheduler = "stealing";
    unsigned threads = 1;
    app.add_option("--listen", cfg.listen, "host:port (port 0 picks a free port)");
    app.add_option("--registry", cfg.registry, "registry endpoint")->required();
    app.add_option("--table", cfg.table_path, "monolithic .tblx file")->required();
    app.add_option("--pids", pids, "comma-separated pid list, or 'auto'");
    app.add_option("--locality", cfg.locality, "this locality's index (auto pids)");
    app.add_option("--localities", cfg.localities, "total locality count (auto pids)");
    app.add_option("--parts", cfg.parts, "total partition count");
    app.add_option("--threads", threads, "scheduler workers");
    app.add_option("--scheduler", scheduler, "global | stealing");

    try {
        app.parse(argc, argv);
        if (pids == "auto") {
            cfg.auto_pids = true;
        } else {
            std::istringstream ss(pids);
            std::string tok;
            while (std::getline(ss, tok, ',')) cfg.pids.push_back(std::uint32_t(std::stoul(tok)));
        }
        cfg.sched.workers = threads;
        cfg.sched.policy =
            scheduler == "global" ? SchedPolicy::global_queue : SchedPolicy::local_stealing;

        LocalityServer server(cfg);
        g_server = &server;
        std::signal(SIGTERM, on_signal);
        std::signal(SIGINT, on_signal);
        std::string hosted;
        for (auto pid : server.hosted_pids()) hosted += (hosted.empty() ? "" : ",") + std::to_string(pid);
        std::printf("serving %s pids=%s resident=%llu\n", server.endpoint().c_str(),
                    hosted.c_str(), (unsigned long long)server.resident_bytes());
        std::fflush(stdout);
        server.run();
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const TablexError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
