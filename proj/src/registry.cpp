#include "tablex/registry.hpp"

namespace tablex {

std::uint64_t RegistryState::register_pid(std::uint32_t pid, const std::string& endpoint) {
    std::lock_guard lk(m_);
    auto& b = bindings_[pid];
    b.pid = pid;
    b.endpoint = endpoint;
    b.epoch += 1;
    return b.epoch;
}

BindingInfo RegistryState::resolve(std::uint32_t pid) const {
    std::lock_guard lk(m_);
    auto it = bindings_.find(pid);
    if (it == bindings_.end())
        throw TablexError(ErrorCode::UnknownPid, "pid " + std::to_string(pid));
    return it->second;
}

std::vector<BindingInfo> RegistryState::resolve_all() const {
    std::lock_guard lk(m_);
    std::vector<BindingInfo> out;
    out.reserve(bindings_.size());
    for (const auto& [pid, b] : bindings_) out.push_back(b);
    return out;
}

void RegistryState::put_routing(RoutingMap map, TableSchema schema) {
    std::lock_guard lk(m_);
    routing_ = {std::move(map), std::move(schema)};
}

std::pair<RoutingMap, TableSchema> RegistryState::get_routing() const {
    std::lock_guard lk(m_);
    if (!routing_) throw TablexError(ErrorCode::NoRoutingStored, "no routing map stored");
    return *routing_;
}

RegistryServer::RegistryServer(const std::string& listen_endpoint)
    : listener_(listen_endpoint) {}

RegistryServer::~RegistryServer() { stop(); }

void RegistryServer::start() {
    acceptor_ = std::thread([this] { run(); });
}

void RegistryServer::run() {
    while (!stopping_.load()) {
        Socket sock;
        try {
            sock = listener_.accept();
        } catch (const TablexError&) {
            break;  // listener closed by stop()
        }
        auto shared = std::make_shared<Socket>(std::move(sock));
        std::lock_guard lk(conn_m_);
        conns_.emplace_back(std::thread([this, shared] { handle_connection(*shared); }),
                            shared);
    }
}

void RegistryServer::stop() {
    if (stopping_.exchange(true)) return;
    listener_.close();
    if (acceptor_.joinable()) acceptor_.join();
    std::lock_guard lk(conn_m_);
    for (auto& [t, sock] : conns_) sock->shutdown_both();
    for (auto& [t, sock] : conns_)
        if (t.joinable()) t.join();
    conns_.clear();
}

void RegistryServer::handle_connection(Socket& sock) {
    // A malformed frame poisons only this connection.
    try {
        while (true) {
            ParcelMessage req = read_frame(sock.fd());
            ParcelMessage rsp;
            rsp.request_id = req.request_id;
            try {
                switch (req.type) {
                    case MsgType::PING:
                        rsp.type = MsgType::PONG;
                        break;
                    case MsgType::REGISTER: {
                        auto [pid, ep] = unpack_register(req.payload);
                        rsp.type = MsgType::REGISTER;
                        rsp.payload = pack_epoch(state_.register_pid(pid, ep));
                        break;
                    }
                    case MsgType::RESOLVE: {
                        const auto pid = unpack_resolve(req.payload);
                        rsp.type = MsgType::RESOLVE;
                        if (pid == kResolveAll)
                            rsp.payload = pack_bindings(state_.resolve_all());
                        else
                            rsp.payload = pack_bindings({state_.resolve(pid)});
                        break;
                    }
                    case MsgType::PUT_ROUTING: {
                        auto [map, schema] = unpack_routing(req.payload);
                        state_.put_routing(std::move(map), std::move(schema));
                        rsp.type = MsgType::PUT_ROUTING;
                        break;
                    }
                    case MsgType::GET_ROUTING: {
                        auto [map, schema] = state_.get_routing();
                        rsp.type = MsgType::GET_ROUTING;
                        rsp.payload = pack_routing(map, schema);
                        break;
                    }
                    default:
                        rsp.type = MsgType::ERROR;
                        rsp.payload = pack_error(ErrorCode::BadRequest, "unsupported message");
                }
            } catch (const TablexError& e) {
                rsp.type = MsgType::ERROR;
                rsp.payload = pack_error(e.code(), e.detail());
            }
            write_frame(sock.fd(), rsp);
        }
    } catch (const TablexError&) {
        // connection closed or poisoned; drop it
    }
}

}  // namespace tablex
