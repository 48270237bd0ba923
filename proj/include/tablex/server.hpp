#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "tablex/futures.hpp"
#include "tablex/net.hpp"
#include "tablex/partition.hpp"
#include "tablex/wire.hpp"

namespace tablex {

struct ServerConfig {
    std::string listen = "127.0.0.1:0";
    std::string registry;
    std::string table_path;
    std::vector<std::uint32_t> pids;  // empty with auto_pids set = round-robin
    bool auto_pids = false;
    std::uint32_t locality = 0;     // this locality's index (for auto pids)
    std::uint32_t localities = 1;   // total localities (for auto pids)
    std::uint32_t parts = 32;
    SchedulerConfig sched;
};

// One locality: hosts slices for its pids and answers interpolation parcels.
// Each incoming parcel is handled as a scheduler task.
class LocalityServer {
  public:
    explicit LocalityServer(ServerConfig cfg);
    ~LocalityServer();

    std::string endpoint() const { return listener_->local_endpoint(); }
    std::uint64_t resident_bytes() const;
    const std::vector<std::uint32_t>& hosted_pids() const { return hosted_; }

    void run();    // blocks until stop()
    void start();  // background thread
    void stop();

  private:
    void load_and_register();
    void handle_connection(std::shared_ptr<Socket> sock);
    ParcelMessage handle_request(const ParcelMessage& req) const;
    const TableBlock* slice_for_base(std::uint32_t base_i) const;

    ServerConfig cfg_;
    RoutingMap routing_;
    std::vector<std::uint32_t> hosted_;
    std::map<std::uint32_t, TableBlock> slices_;  // pid -> slice
    std::unique_ptr<TcpListener> listener_;
    std::unique_ptr<Scheduler> sched_;
    std::atomic<bool> stopping_{false};
    std::thread acceptor_;
    std::mutex conn_m_;
    std::vector<std::pair<std::thread, std::shared_ptr<Socket>>> conns_;
};

}  // namespace tablex
