#include "tablex/wire.hpp"

#include <cstring>

#include "tablex/net.hpp"

namespace tablex {

namespace {

class Writer {
  public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { raw(&v, 2); }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void u64(std::uint64_t v) { raw(&v, 8); }
    void f64(double v) { raw(&v, 8); }
    void str16(const std::string& s) {
        if (s.size() > 0xFFFF) throw TablexError(ErrorCode::BadRequest, "string too long");
        u16(std::uint16_t(s.size()));
        raw(s.data(), s.size());
    }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

  private:
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    std::vector<std::uint8_t> buf_;
};

class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> s) : s_(s) {}
    std::uint8_t u8() { return take(1)[0]; }
    std::uint16_t u16() { return get<std::uint16_t>(); }
    std::uint32_t u32() { return get<std::uint32_t>(); }
    std::uint64_t u64() { return get<std::uint64_t>(); }
    double f64() { return get<double>(); }
    std::string str16() {
        const auto n = u16();
        auto b = take(n);
        return std::string(reinterpret_cast<const char*>(b.data()), n);
    }
    void expect_end() const {
        if (pos_ != s_.size())
            throw TablexError(ErrorCode::BadRequest, "trailing bytes in payload");
    }

  private:
    template <typename T>
    T get() {
        T v;
        std::memcpy(&v, take(sizeof(T)).data(), sizeof(T));
        return v;
    }
    std::span<const std::uint8_t> take(std::size_t n) {
        if (pos_ + n > s_.size())
            throw TablexError(ErrorCode::Truncated, "payload too short");
        auto out = s_.subspan(pos_, n);
        pos_ += n;
        return out;
    }
    std::span<const std::uint8_t> s_;
    std::size_t pos_ = 0;
};

void put_u32(std::uint8_t* p, std::uint32_t v) { std::memcpy(p, &v, 4); }

}  // namespace

std::vector<std::uint8_t> encode(const ParcelMessage& msg) {
    const std::uint64_t body = 1 + 8 + msg.payload.size();
    if (body > kMaxFrameBytes)
        throw TablexError(ErrorCode::LengthOverflow, "frame body " + std::to_string(body));
    std::vector<std::uint8_t> out(4 + body);
    put_u32(out.data(), std::uint32_t(body));
    out[4] = std::uint8_t(msg.type);
    std::memcpy(out.data() + 5, &msg.request_id, 8);
    std::memcpy(out.data() + 13, msg.payload.data(), msg.payload.size());
    return out;
}

ParcelMessage decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4) throw TablexError(ErrorCode::Truncated, "no length prefix");
    std::uint32_t body;
    std::memcpy(&body, bytes.data(), 4);
    if (body > kMaxFrameBytes)
        throw TablexError(ErrorCode::LengthOverflow, "frame body " + std::to_string(body));
    if (body < 9) throw TablexError(ErrorCode::Truncated, "frame body below minimum");
    if (bytes.size() < 4 + std::size_t(body))
        throw TablexError(ErrorCode::Truncated, "incomplete frame");
    ParcelMessage msg;
    const std::uint8_t t = bytes[4];
    if (t < 1 || t > 10)
        throw TablexError(ErrorCode::UnknownType, "message type " + std::to_string(t));
    msg.type = MsgType(t);
    std::memcpy(&msg.request_id, bytes.data() + 5, 8);
    msg.payload.assign(bytes.begin() + 13, bytes.begin() + 4 + body);
    return msg;
}

ParcelMessage read_frame(int fd) {
    std::uint8_t len_buf[4];
    if (!read_exact(fd, len_buf, 4, /*allow_eof=*/true))
        throw TablexError(ErrorCode::ConnectionClosed, "stream ended");
    std::uint32_t body;
    std::memcpy(&body, len_buf, 4);
    if (body > kMaxFrameBytes)
        throw TablexError(ErrorCode::LengthOverflow, "frame body " + std::to_string(body));
    if (body < 9) throw TablexError(ErrorCode::Truncated, "frame body below minimum");
    std::vector<std::uint8_t> buf(4 + body);
    std::memcpy(buf.data(), len_buf, 4);
    read_exact(fd, buf.data() + 4, body);
    return decode(buf);
}

void write_frame(int fd, const ParcelMessage& msg) {
    const auto bytes = encode(msg);
    write_all(fd, bytes.data(), bytes.size());
}

// ---- payload codecs --------------------------------------------------------

std::vector<std::uint8_t> pack_query(const QueryPoint& p) {
    Writer w;
    w.f64(p.rho);
    w.f64(p.temp);
    w.f64(p.ye);
    return w.take();
}

QueryPoint unpack_query(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    QueryPoint p{r.f64(), r.f64(), r.f64()};
    r.expect_end();
    return p;
}

std::vector<std::uint8_t> pack_query_bulk(const std::vector<QueryPoint>& pts) {
    Writer w;
    w.u32(std::uint32_t(pts.size()));
    for (const auto& p : pts) {
        w.f64(p.rho);
        w.f64(p.temp);
        w.f64(p.ye);
    }
    return w.take();
}

std::vector<QueryPoint> unpack_query_bulk(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    const auto n = r.u32();
    if (std::size_t(n) * 24 + 4 != payload.size())
        throw TablexError(ErrorCode::Truncated, "bulk count mismatch");
    std::vector<QueryPoint> pts(n);
    for (auto& p : pts) p = {r.f64(), r.f64(), r.f64()};
    return pts;
}

std::vector<std::uint8_t> pack_result(const std::vector<double>& values) {
    Writer w;
    w.u32(std::uint32_t(values.size()));
    for (double v : values) w.f64(v);
    return w.take();
}

std::vector<double> unpack_result(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    const auto n = r.u32();
    if (std::size_t(n) * 8 + 4 != payload.size())
        throw TablexError(ErrorCode::Truncated, "result count mismatch");
    std::vector<double> vals(n);
    for (auto& v : vals) v = r.f64();
    return vals;
}

std::vector<std::uint8_t> pack_error(ErrorCode code, const std::string& detail) {
    Writer w;
    w.u16(std::uint16_t(code));
    w.str16(detail);
    return w.take();
}

std::pair<ErrorCode, std::string> unpack_error(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    const auto code = ErrorCode(r.u16());
    auto detail = r.str16();
    r.expect_end();
    return {code, std::move(detail)};
}

std::vector<std::uint8_t> pack_register(std::uint32_t pid, const std::string& endpoint) {
    Writer w;
    w.u8(kProtoVersion);
    w.u32(pid);
    w.str16(endpoint);
    return w.take();
}

std::pair<std::uint32_t, std::string> unpack_register(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    const auto version = r.u8();
    if (version != kProtoVersion)
        throw TablexError(ErrorCode::VersionMismatch,
                          "protocol version " + std::to_string(version));
    const auto pid = r.u32();
    auto ep = r.str16();
    r.expect_end();
    return {pid, std::move(ep)};
}

std::vector<std::uint8_t> pack_epoch(std::uint64_t epoch) {
    Writer w;
    w.u64(epoch);
    return w.take();
}

std::uint64_t unpack_epoch(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    const auto e = r.u64();
    r.expect_end();
    return e;
}

std::vector<std::uint8_t> pack_resolve(std::uint32_t pid) {
    Writer w;
    w.u32(pid);
    return w.take();
}

std::uint32_t unpack_resolve(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    const auto pid = r.u32();
    r.expect_end();
    return pid;
}

std::vector<std::uint8_t> pack_bindings(const std::vector<BindingInfo>& bindings) {
    Writer w;
    w.u32(std::uint32_t(bindings.size()));
    for (const auto& b : bindings) {
        w.u32(b.pid);
        w.u64(b.epoch);
        w.str16(b.endpoint);
    }
    return w.take();
}

std::vector<BindingInfo> unpack_bindings(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    const auto n = r.u32();
    std::vector<BindingInfo> out(n);
    for (auto& b : out) {
        b.pid = r.u32();
        b.epoch = r.u64();
        b.endpoint = r.str16();
    }
    r.expect_end();
    return out;
}

std::vector<std::uint8_t> pack_routing(const RoutingMap& map, const TableSchema& schema) {
    Writer w;
    w.u32(map.n_partitions);
    w.u32(std::uint32_t(map.boundaries.size()));
    for (auto b : map.boundaries) w.u32(b);
    w.u32(std::uint32_t(map.placement.size()));
    for (auto p : map.placement) w.u32(p);
    for (const auto& ax : schema.axes) {
        w.u8(std::uint8_t(ax.scale));
        w.f64(ax.lo);
        w.f64(ax.hi);
        w.u32(ax.count);
    }
    w.u32(std::uint32_t(schema.variable_names.size()));
    for (const auto& name : schema.variable_names) w.str16(name);
    w.u32(std::uint32_t(schema.selected.size()));
    for (auto s : schema.selected) w.u32(s);
    return w.take();
}

std::pair<RoutingMap, TableSchema> unpack_routing(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    RoutingMap map;
    map.n_partitions = r.u32();
    map.boundaries.resize(r.u32());
    for (auto& b : map.boundaries) b = r.u32();
    map.placement.resize(r.u32());
    for (auto& p : map.placement) p = r.u32();
    TableSchema schema;
    const char* axis_names[3] = {"density", "temperature", "ye"};
    for (int a = 0; a < 3; ++a) {
        schema.axes[a].name = axis_names[a];
        schema.axes[a].scale = AxisScale(r.u8());
        schema.axes[a].lo = r.f64();
        schema.axes[a].hi = r.f64();
        schema.axes[a].count = r.u32();
    }
    schema.variable_names.resize(r.u32());
    for (auto& name : schema.variable_names) name = r.str16();
    schema.selected.resize(r.u32());
    for (auto& s : schema.selected) s = r.u32();
    r.expect_end();
    return {std::move(map), std::move(schema)};
}

}  // namespace tablex
