#pragma once

#include <cstdint>
#include <string>
#include <utility>

namespace tablex {

// Thin RAII wrappers over POSIX TCP sockets; loopback-grade, no TLS.

class Socket {
  public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket() { close(); }
    Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Socket& operator=(Socket&& o) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    void close();
    void shutdown_both();

  private:
    int fd_ = -1;
};

class TcpListener {
  public:
    // endpoint "host:port"; port 0 picks a free port.
    explicit TcpListener(const std::string& endpoint);
    Socket accept();
    std::string local_endpoint() const { return endpoint_; }
    std::uint16_t port() const { return port_; }
    // Also wakes a blocked accept().
    void close() {
        sock_.shutdown_both();
        sock_.close();
    }

  private:
    Socket sock_;
    std::string endpoint_;
    std::uint16_t port_ = 0;
};

Socket tcp_connect(const std::string& endpoint);

std::pair<std::string, std::uint16_t> split_endpoint(const std::string& endpoint);

// Full-buffer IO; throws ConnectionClosed / Truncated / IoError.
void write_all(int fd, const void* data, std::size_t n);
// Returns false on clean EOF at offset 0 when allow_eof is set.
bool read_exact(int fd, void* data, std::size_t n, bool allow_eof = false);

}  // namespace tablex
