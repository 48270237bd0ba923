#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <vector>

#include "tablex/futures.hpp"
#include "tablex/net.hpp"
#include "tablex/partition.hpp"
#include "tablex/wire.hpp"

namespace tablex {

struct BulkOutcome {
    std::vector<BulkSlot> slots;  // input order preserved
};

// Client-side table object: resolves routing once, keeps one connection per
// endpoint, and demultiplexes responses by request_id. Shareable across
// threads.
class TableClient {
  public:
    explicit TableClient(const std::string& registry_endpoint);
    ~TableClient();

    const TableSchema& schema() const { return schema_; }
    const RoutingMap& routing() const { return routing_; }
    std::size_t connection_count() const { return conns_.size(); }

    // Sends the query to the owner partition and returns immediately; the
    // future completes when the response arrives. Out-of-range points fail
    // locally without a network send.
    Future<std::vector<double>> query_async(const QueryPoint& p);

    // Groups by owner, one QUERY_BULK per owner, results scattered back
    // into input order.
    Future<BulkOutcome> query_bulk_async(const std::vector<QueryPoint>& points);

    std::vector<double> query_sync(const QueryPoint& p) { return query_async(p).read(); }

    std::uint64_t round_trips() const { return round_trips_.load(); }

  private:
    struct Connection {
        Socket sock;
        std::mutex write_m;
        std::thread reader;
        std::vector<std::uint64_t> owned_ids;  // for failure propagation
    };

    Connection& conn_for_pid(std::uint32_t pid);
    std::uint64_t send(Connection& c, MsgType type, std::vector<std::uint8_t> payload,
                       std::function<void(ParcelMessage&&)> on_reply);
    void reader_loop(Connection* c);
    void fail_pending_on(Connection* c);

    TableSchema schema_;
    RoutingMap routing_;
    std::map<std::uint32_t, std::string> pid_endpoint_;
    std::map<std::string, std::unique_ptr<Connection>> conns_;

    std::mutex pending_m_;
    std::unordered_map<std::uint64_t, std::function<void(ParcelMessage&&)>> pending_;
    std::unordered_map<std::uint64_t, Connection*> pending_conn_;
    std::atomic<std::uint64_t> next_id_{1};
    std::atomic<std::uint64_t> round_trips_{0};
    std::atomic<bool> closing_{false};
};

}  // namespace tablex
