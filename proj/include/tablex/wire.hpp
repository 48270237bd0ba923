#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tablex/error.hpp"
#include "tablex/partition.hpp"
#include "tablex/table.hpp"

namespace tablex {

enum class MsgType : std::uint8_t {
    QUERY = 1,
    QUERY_BULK = 2,
    RESULT = 3,
    ERROR = 4,
    REGISTER = 5,
    RESOLVE = 6,
    PUT_ROUTING = 7,
    GET_ROUTING = 8,
    PING = 9,
    PONG = 10,
};

// One framed parcel: u32 little-endian length of (type + request_id +
// payload), then those bytes. Payload structure depends on msg_type and is
// handled by the pack_/unpack_ helpers below; the envelope treats it as
// opaque bytes.
struct ParcelMessage {
    MsgType type = MsgType::PING;
    std::uint64_t request_id = 0;
    std::vector<std::uint8_t> payload;

    bool operator==(const ParcelMessage&) const = default;
};

constexpr std::uint32_t kMaxFrameBytes = 64u << 20;
constexpr std::uint8_t kProtoVersion = 1;

std::vector<std::uint8_t> encode(const ParcelMessage& msg);
ParcelMessage decode(std::span<const std::uint8_t> bytes);

// Blocking framed IO over a connected socket fd. write_frame needs external
// serialization per stream (one writer at a time).
ParcelMessage read_frame(int fd);
void write_frame(int fd, const ParcelMessage& msg);

// ---- payload codecs --------------------------------------------------------

struct BindingInfo {
    std::uint32_t pid = 0;
    std::uint64_t epoch = 0;
    std::string endpoint;

    bool operator==(const BindingInfo&) const = default;
};

// Sentinel pid for RESOLVE meaning "all bindings".
constexpr std::uint32_t kResolveAll = 0xFFFFFFFFu;

std::vector<std::uint8_t> pack_query(const QueryPoint& p);
QueryPoint unpack_query(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> pack_query_bulk(const std::vector<QueryPoint>& pts);
std::vector<QueryPoint> unpack_query_bulk(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> pack_result(const std::vector<double>& values);
std::vector<double> unpack_result(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> pack_error(ErrorCode code, const std::string& detail);
std::pair<ErrorCode, std::string> unpack_error(std::span<const std::uint8_t> payload);

// REGISTER request: proto version byte, pid, endpoint. Reply: u64 epoch.
std::vector<std::uint8_t> pack_register(std::uint32_t pid, const std::string& endpoint);
std::pair<std::uint32_t, std::string> unpack_register(std::span<const std::uint8_t> payload);
std::vector<std::uint8_t> pack_epoch(std::uint64_t epoch);
std::uint64_t unpack_epoch(std::span<const std::uint8_t> payload);

// RESOLVE request: u32 pid (kResolveAll for a full snapshot).
// Reply: u32 count then count bindings.
std::vector<std::uint8_t> pack_resolve(std::uint32_t pid);
std::uint32_t unpack_resolve(std::span<const std::uint8_t> payload);
std::vector<std::uint8_t> pack_bindings(const std::vector<BindingInfo>& bindings);
std::vector<BindingInfo> unpack_bindings(std::span<const std::uint8_t> payload);

// PUT_ROUTING payload / GET_ROUTING reply: RoutingMap plus TableSchema.
std::vector<std::uint8_t> pack_routing(const RoutingMap& map, const TableSchema& schema);
std::pair<RoutingMap, TableSchema> unpack_routing(std::span<const std::uint8_t> payload);

}  // namespace tablex
