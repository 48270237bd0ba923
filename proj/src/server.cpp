#include "tablex/server.hpp"

namespace tablex {

LocalityServer::LocalityServer(ServerConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.pids.empty() && !cfg_.auto_pids)
        throw TablexError(ErrorCode::BadRequest, "no pids to host");
    listener_ = std::make_unique<TcpListener>(cfg_.listen);
    sched_ = std::make_unique<Scheduler>(cfg_.sched);
    load_and_register();
}

LocalityServer::~LocalityServer() { stop(); }

void LocalityServer::load_and_register() {
    // Header first: the partition plan needs only n0.
    TableBlock header_probe = read_table_rows(cfg_.table_path, 0, 1);
    const TableSchema schema = header_probe.schema;
    const std::uint32_t n0 = schema.axes[0].count;
    auto parts = plan_partitions(n0, cfg_.parts);
    routing_ = make_routing(parts, cfg_.localities);

    if (cfg_.auto_pids) {
        for (const auto& d : parts)
            if (d.pid % cfg_.localities == cfg_.locality) hosted_.push_back(d.pid);
    } else {
        hosted_ = cfg_.pids;
    }
    if (hosted_.empty()) throw TablexError(ErrorCode::BadRequest, "no pids to host");

    for (auto pid : hosted_) {
        if (pid >= parts.size())
            throw TablexError(ErrorCode::BadRequest, "pid " + std::to_string(pid) +
                                                         " exceeds partition count");
        const auto& d = parts[pid];
        slices_.emplace(pid, read_table_rows(cfg_.table_path, d.stored_lo, d.stored_hi));
    }

    if (!cfg_.registry.empty()) {
        Socket reg = tcp_connect(cfg_.registry);
        std::uint64_t rid = 1;
        ParcelMessage put{MsgType::PUT_ROUTING, rid++, pack_routing(routing_, schema)};
        write_frame(reg.fd(), put);
        ParcelMessage ack = read_frame(reg.fd());
        if (ack.type == MsgType::ERROR) {
            auto [code, detail] = unpack_error(ack.payload);
            throw TablexError(code, "registry rejected routing: " + detail);
        }
        for (auto pid : hosted_) {
            ParcelMessage msg{MsgType::REGISTER, rid++,
                              pack_register(pid, listener_->local_endpoint())};
            write_frame(reg.fd(), msg);
            ParcelMessage rsp = read_frame(reg.fd());
            if (rsp.type == MsgType::ERROR) {
                auto [code, detail] = unpack_error(rsp.payload);
                throw TablexError(code, "register pid " + std::to_string(pid) + ": " + detail);
            }
        }
    }
}

std::uint64_t LocalityServer::resident_bytes() const {
    std::uint64_t total = 0;
    for (const auto& [pid, block] : slices_)
        for (const auto& d : block.data) total += d.size() * 8;
    return total;
}

const TableBlock* LocalityServer::slice_for_base(std::uint32_t base_i) const {
    const std::uint32_t owner = owner_of(routing_, base_i);
    auto it = slices_.find(owner);
    return it == slices_.end() ? nullptr : &it->second;
}

ParcelMessage LocalityServer::handle_request(const ParcelMessage& req) const {
    ParcelMessage rsp;
    rsp.request_id = req.request_id;
    try {
        switch (req.type) {
            case MsgType::PING:
                rsp.type = MsgType::PONG;
                break;
            case MsgType::QUERY: {
                const QueryPoint p = unpack_query(req.payload);
                const auto& schema = slices_.begin()->second.schema;
                const CellLocation loc = locate_point(schema, p);
                const TableBlock* slice = slice_for_base(loc.base[0]);
                if (!slice)
                    throw TablexError(ErrorCode::RowNotResident,
                                      "base row " + std::to_string(loc.base[0]) +
                                          " not hosted here");
                std::vector<double> values(schema.selected.size());
                interpolate_at(*slice, loc, values.data());
                rsp.type = MsgType::RESULT;
                rsp.payload = pack_result(values);
                break;
            }
            case MsgType::QUERY_BULK: {
                const auto points = unpack_query_bulk(req.payload);
                const auto& schema = slices_.begin()->second.schema;
                std::vector<double> values;
                values.reserve(points.size() * schema.selected.size());
                std::vector<double> one(schema.selected.size());
                for (const auto& p : points) {
                    const CellLocation loc = locate_point(schema, p);
                    const TableBlock* slice = slice_for_base(loc.base[0]);
                    if (!slice)
                        throw TablexError(ErrorCode::RowNotResident,
                                          "base row " + std::to_string(loc.base[0]) +
                                              " not hosted here");
                    interpolate_at(*slice, loc, one.data());
                    values.insert(values.end(), one.begin(), one.end());
                }
                rsp.type = MsgType::RESULT;
                rsp.payload = pack_result(values);
                break;
            }
            default:
                throw TablexError(ErrorCode::BadRequest, "unsupported message type");
        }
    } catch (const TablexError& e) {
        rsp.type = MsgType::ERROR;
        rsp.payload = pack_error(e.code(), e.detail());
    }
    return rsp;
}

void LocalityServer::run() {
    while (!stopping_.load()) {
        Socket sock;
        try {
            sock = listener_->accept();
        } catch (const TablexError&) {
            break;
        }
        auto shared = std::make_shared<Socket>(std::move(sock));
        std::lock_guard lk(conn_m_);
        conns_.emplace_back(std::thread([this, shared] { handle_connection(shared); }),
                            shared);
    }
}

void LocalityServer::start() {
    acceptor_ = std::thread([this] { run(); });
}

void LocalityServer::stop() {
    if (stopping_.exchange(true)) return;
    listener_->close();
    if (acceptor_.joinable()) acceptor_.join();
    {
        std::lock_guard lk(conn_m_);
        for (auto& [t, sock] : conns_) sock->shutdown_both();
        for (auto& [t, sock] : conns_)
            if (t.joinable()) t.join();
        conns_.clear();
    }
    sched_->shutdown();
}

void LocalityServer::handle_connection(std::shared_ptr<Socket> sock_p) {
    auto write_m = std::make_shared<std::mutex>();
    std::atomic<std::uint64_t> in_flight{0};
    try {
        while (true) {
            auto req = std::make_shared<ParcelMessage>(read_frame(sock_p->fd()));
            in_flight.fetch_add(1);
            // One task per parcel; replies serialized per connection.
            sched_->submit([this, req, sock_p, write_m, &in_flight] {
                ParcelMessage rsp = handle_request(*req);
                try {
                    std::lock_guard lk(*write_m);
                    write_frame(sock_p->fd(), rsp);
                } catch (const TablexError&) {
                    // peer went away; nothing to do
                }
                in_flight.fetch_sub(1);
            });
        }
    } catch (const TablexError&) {
        // connection closed or poisoned
    }
    while (in_flight.load() != 0) std::this_thread::yield();
}

}  // namespace tablex
