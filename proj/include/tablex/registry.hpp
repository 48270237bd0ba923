#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "tablex/net.hpp"
#include "tablex/wire.hpp"

namespace tablex {

// Centralized name service: pid -> endpoint bindings plus one stored routing
// map. One live binding per pid; epoch bumps on every rebind.
class RegistryState {
  public:
    std::uint64_t register_pid(std::uint32_t pid, const std::string& endpoint);
    BindingInfo resolve(std::uint32_t pid) const;
    std::vector<BindingInfo> resolve_all() const;

    void put_routing(RoutingMap map, TableSchema schema);
    std::pair<RoutingMap, TableSchema> get_routing() const;

  private:
    mutable std::mutex m_;
    std::map<std::uint32_t, BindingInfo> bindings_;
    std::optional<std::pair<RoutingMap, TableSchema>> routing_;
};

// Serves RegistryState over TCP until stop() is called. Threads: one
// acceptor plus one per live connection.
class RegistryServer {
  public:
    explicit RegistryServer(const std::string& listen_endpoint);
    ~RegistryServer();

    std::string endpoint() const { return listener_.local_endpoint(); }
    RegistryState& state() { return state_; }

    void run();    // blocks until stop()
    void start();  // runs in a background thread
    void stop();

  private:
    void handle_connection(Socket& sock);

    RegistryState state_;
    TcpListener listener_;
    std::atomic<bool> stopping_{false};
    std::thread acceptor_;
    std::mutex conn_m_;
    std::vector<std::pair<std::thread, std::shared_ptr<Socket>>> conns_;
};

}  // namespace tablex
