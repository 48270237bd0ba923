// Standalone address-resolution server (pid -> endpoint, plus routing map).

#include <csignal>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "tablex/registry.hpp"

using namespace tablex;

namespace {
RegistryServer* g_server = nullptr;
void on_signal(int) {
    if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"standalone registry server"};
    std::string listen = "127.0.0.1:7100";
    app.add_option("--listen", listen, "host:port (port 0 picks a free port)");
    try {
        app.parse(argc, argv);
        RegistryServer server(listen);
        g_server = &server;
        std::signal(SIGTERM, on_signal);
        std::signal(SIGINT, on_signal);
        std::printf("listening %s\n", server.endpoint().c_str());
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
