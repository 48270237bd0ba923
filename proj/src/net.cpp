#include "tablex/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "tablex/error.hpp"

namespace tablex {

Socket& Socket::operator=(Socket&& o) noexcept {
    if (this != &o) {
        close();
        fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void Socket::shutdown_both() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

std::pair<std::string, std::uint16_t> split_endpoint(const std::string& endpoint) {
    const auto colon = endpoint.rfind(':');
    if (colon == std::string::npos)
        throw TablexError(ErrorCode::BadRequest, "endpoint '" + endpoint + "' lacks ':port'");
    const std::string host = endpoint.substr(0, colon);
    const int port = std::atoi(endpoint.c_str() + colon + 1);
    if (port < 0 || port > 65535)
        throw TablexError(ErrorCode::BadRequest, "bad port in '" + endpoint + "'");
    return {host, std::uint16_t(port)};
}

namespace {

sockaddr_in make_addr(const std::string& endpoint) {
    auto [host, port] = split_endpoint(endpoint);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (host.empty() || host == "*")
        addr.sin_addr.s_addr = htonl(INADDR_ANY);
    else if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw TablexError(ErrorCode::BadRequest, "bad IPv4 host '" + host + "'");
    return addr;
}

void set_nodelay(int fd) {
    int one = 1;
    setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

TcpListener::TcpListener(const std::string& endpoint) {
    sockaddr_in addr = make_addr(endpoint);
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TablexError(ErrorCode::IoError, std::strerror(errno));
    sock_ = Socket(fd);
    int one = 1;
    setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        throw TablexError(ErrorCode::IoError,
                          "bind " + endpoint + ": " + std::strerror(errno));
    if (::listen(fd, 128) != 0)
        throw TablexError(ErrorCode::IoError, std::strerror(errno));
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
    char buf[INET_ADDRSTRLEN];
    inet_ntop(AF_INET, &bound.sin_addr, buf, sizeof(buf));
    std::string host = buf;
    if (host == "0.0.0.0") host = "127.0.0.1";
    endpoint_ = host + ":" + std::to_string(port_);
}

Socket TcpListener::accept() {
    int fd = ::accept(sock_.fd(), nullptr, nullptr);
    if (fd < 0) throw TablexError(ErrorCode::ConnectionClosed, std::strerror(errno));
    set_nodelay(fd);
    return Socket(fd);
}

Socket tcp_connect(const std::string& endpoint) {
    sockaddr_in addr = make_addr(endpoint);
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TablexError(ErrorCode::IoError, std::strerror(errno));
    Socket s(fd);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        throw TablexError(ErrorCode::ConnectRefused,
                          endpoint + ": " + std::strerror(errno));
    set_nodelay(fd);
    return s;
}

void write_all(int fd, const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    while (n > 0) {
        const ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
        if (w < 0) {
            if (errno == EINTR) continue;
            throw TablexError(ErrorCode::ConnectionClosed, std::strerror(errno));
        }
        p += w;
        n -= std::size_t(w);
    }
}

bool read_exact(int fd, void* data, std::size_t n, bool allow_eof) {
    auto* p = static_cast<std::uint8_t*>(data);
    std::size_t got = 0;
    while (got < n) {
        const ssize_t r = ::recv(fd, p + got, n - got, 0);
        if (r < 0) {
            if (errno == EINTR) continue;
            throw TablexError(ErrorCode::ConnectionClosed, std::strerror(errno));
        }
        if (r == 0) {
            if (got == 0 && allow_eof) return false;
            throw TablexError(got == 0 ? ErrorCode::ConnectionClosed : ErrorCode::Truncated,
                              "peer closed mid-read");
        }
        got += std::size_t(r);
    }
    return true;
}

}  // namespace tablex
