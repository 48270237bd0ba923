#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tablex {

// Stable numeric codes; they travel over the wire in ERROR payloads.
enum class ErrorCode : std::uint16_t {
    Ok = 0,
    OutOfRange = 1,
    RowNotResident = 2,
    BadMagic = 3,
    VersionMismatch = 4,
    TruncatedFile = 5,
    NonFiniteValue = 6,
    TooManyPartitions = 7,
    RangeMismatch = 8,
    SchedulerShutdown = 9,
    DoubleWrite = 10,
    Truncated = 11,
    UnknownType = 12,
    LengthOverflow = 13,
    ConnectionClosed = 14,
    UnknownPid = 15,
    NoRoutingStored = 16,
    ConnectRefused = 17,
    GenTooLarge = 18,
    IoError = 19,
    BadRequest = 20,
};

const char* error_code_name(ErrorCode c);

class TablexError : public std::runtime_error {
  public:
    TablexError(ErrorCode code, std::string detail)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
          code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

  private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace tablex
