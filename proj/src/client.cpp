#include "tablex/client.hpp"

#include <algorithm>

namespace tablex {

TableClient::TableClient(const std::string& registry_endpoint) {
    Socket reg = tcp_connect(registry_endpoint);
    std::uint64_t rid = 1;
    write_frame(reg.fd(), {MsgType::GET_ROUTING, rid, {}});
    ParcelMessage rsp = read_frame(reg.fd());
    if (rsp.type == MsgType::ERROR) {
        auto [code, detail] = unpack_error(rsp.payload);
        throw TablexError(code, detail);
    }
    std::tie(routing_, schema_) = unpack_routing(rsp.payload);

    write_frame(reg.fd(), {MsgType::RESOLVE, ++rid, pack_resolve(kResolveAll)});
    rsp = read_frame(reg.fd());
    if (rsp.type == MsgType::ERROR) {
        auto [code, detail] = unpack_error(rsp.payload);
        throw TablexError(code, detail);
    }
    const auto bindings = unpack_bindings(rsp.payload);
    for (std::uint32_t pid = 0; pid < routing_.n_partitions; ++pid) {
        auto it = std::find_if(bindings.begin(), bindings.end(),
                               [pid](const BindingInfo& b) { return b.pid == pid; });
        if (it == bindings.end())
            throw TablexError(ErrorCode::UnknownPid,
                              "pid " + std::to_string(pid) + " has no binding");
        pid_endpoint_[pid] = it->endpoint;
    }
    // One connection per distinct endpoint; one demux reader each.
    for (const auto& [pid, ep] : pid_endpoint_) {
        if (conns_.count(ep)) continue;
        auto c = std::make_unique<Connection>();
        c->sock = tcp_connect(ep);
        conns_.emplace(ep, std::move(c));
    }
    for (auto& [ep, c] : conns_) {
        Connection* cp = c.get();
        cp->reader = std::thread([this, cp] { reader_loop(cp); });
    }
}

TableClient::~TableClient() {
    closing_.store(true);
    for (auto& [ep, c] : conns_) c->sock.shutdown_both();
    for (auto& [ep, c] : conns_)
        if (c->reader.joinable()) c->reader.join();
}

TableClient::Connection& TableClient::conn_for_pid(std::uint32_t pid) {
    return *conns_.at(pid_endpoint_.at(pid));
}

std::uint64_t TableClient::send(Connection& c, MsgType type, std::vector<std::uint8_t> payload,
                                std::function<void(ParcelMessage&&)> on_reply) {
    const std::uint64_t id = next_id_.fetch_add(1);
    {
        std::lock_guard lk(pending_m_);
        pending_.emplace(id, std::move(on_reply));
        pending_conn_.emplace(id, &c);
    }
    try {
        ParcelMessage msg{type, id, std::move(payload)};
        std::lock_guard wlk(c.write_m);
        write_frame(c.sock.fd(), msg);
    } catch (...) {
        std::lock_guard lk(pending_m_);
        pending_.erase(id);
        pending_conn_.erase(id);
        throw;
    }
    return id;
}

void TableClient::reader_loop(Connection* c) {
    try {
        while (true) {
            ParcelMessage rsp = read_frame(c->sock.fd());
            std::function<void(ParcelMessage&&)> cb;
            {
                std::lock_guard lk(pending_m_);
                auto it = pending_.find(rsp.request_id);
                if (it == pending_.end()) continue;  // stray response
                cb = std::move(it->second);
                pending_.erase(it);
                pending_conn_.erase(rsp.request_id);
            }
            round_trips_.fetch_add(1);
            cb(std::move(rsp));
        }
    } catch (const TablexError&) {
        if (!closing_.load()) fail_pending_on(c);
    }
}

void TableClient::fail_pending_on(Connection* c) {
    std::vector<std::function<void(ParcelMessage&&)>> victims;
    {
        std::lock_guard lk(pending_m_);
        for (auto it = pending_conn_.begin(); it != pending_conn_.end();) {
            if (it->second == c) {
                auto pit = pending_.find(it->first);
                victims.push_back(std::move(pit->second));
                pending_.erase(pit);
                it = pending_conn_.erase(it);
            } else {
                ++it;
            }
        }
    }
    ParcelMessage err;
    err.type = MsgType::ERROR;
    err.payload = pack_error(ErrorCode::ConnectionClosed, "locality connection lost");
    for (auto& cb : victims) cb(ParcelMessage(err));
}

Future<std::vector<double>> TableClient::query_async(const QueryPoint& p) {
    auto fut = make_unset_future<std::vector<double>>();
    CellLocation loc;
    try {
        loc = locate_point(schema_, p);
    } catch (...) {
        fut.fail(std::current_exception());
        return fut;
    }
    const std::uint32_t owner = owner_of(routing_, loc.base[0]);
    send(conn_for_pid(owner), MsgType::QUERY, pack_query(p), [fut](ParcelMessage&& rsp) {
        if (rsp.type == MsgType::RESULT) {
            fut.write(unpack_result(rsp.payload));
        } else {
            auto [code, detail] = unpack_error(rsp.payload);
            fut.fail(std::make_exception_ptr(TablexError(code, detail)));
        }
    });
    return fut;
}

Future<BulkOutcome> TableClient::query_bulk_async(const std::vector<QueryPoint>& points) {
    auto fut = make_unset_future<BulkOutcome>();
    const std::size_t nsel = schema_.selected.size();

    struct Shared {
        std::mutex m;
        BulkOutcome outcome;
        std::size_t remaining = 0;
        std::exception_ptr first_error;
    };
    auto sh = std::make_shared<Shared>();
    sh->outcome.slots.resize(points.size());

    // Group by owner; per-point OutOfRange is recorded in-slot and never sent.
    std::map<std::uint32_t, std::pair<std::vector<QueryPoint>, std::vector<std::size_t>>> groups;
    for (std::size_t n = 0; n < points.size(); ++n) {
        try {
            const CellLocation loc = locate_point(schema_, points[n]);
            const std::uint32_t owner = owner_of(routing_, loc.base[0]);
            groups[owner].first.push_back(points[n]);
            groups[owner].second.push_back(n);
        } catch (const TablexError& e) {
            sh->outcome.slots[n].code = e.code();
        }
    }
    if (groups.empty()) {
        fut.write(std::move(sh->outcome));
        return fut;
    }
    sh->remaining = groups.size();

    for (auto& [owner, group] : groups) {
        auto indices = std::make_shared<std::vector<std::size_t>>(std::move(group.second));
        send(conn_for_pid(owner), MsgType::QUERY_BULK, pack_query_bulk(group.first),
             [fut, sh, indices, nsel](ParcelMessage&& rsp) {
                 bool complete = false;
                 {
                     std::lock_guard lk(sh->m);
                     if (rsp.type == MsgType::RESULT) {
                         const auto values = unpack_result(rsp.payload);
                         for (std::size_t g = 0; g < indices->size(); ++g) {
                             auto& slot = sh->outcome.slots[(*indices)[g]];
                             slot.values.assign(values.begin() + g * nsel,
                                                values.begin() + (g + 1) * nsel);
                         }
                     } else {
                         auto [code, detail] = unpack_error(rsp.payload);
                         if (!sh->first_error)
                             sh->first_error =
                                 std::make_exception_ptr(TablexError(code, detail));
                     }
                     complete = (--sh->remaining == 0);
                 }
                 if (complete) {
                     if (sh->first_error)
                         fut.fail(sh->first_error);
                     else
                         fut.write(std::move(sh->outcome));
                 }
             });
    }
    return fut;
}

}  // namespace tablex
