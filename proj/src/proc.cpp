#include "tablex/proc.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

#include "tablex/error.hpp"

namespace tablex {

ChildProcess::ChildProcess(const std::vector<std::string>& argv) {
    int pipefd[2];
    if (pipe(pipefd) != 0) throw TablexError(ErrorCode::IoError, std::strerror(errno));
    const pid_t pid = fork();
    if (pid < 0) throw TablexError(ErrorCode::IoError, std::strerror(errno));
    if (pid == 0) {
        dup2(pipefd[1], STDOUT_FILENO);
        close(pipefd[0]);
        close(pipefd[1]);
        std::vector<char*> args;
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execv(args[0], args.data());
        _exit(127);
    }
    close(pipefd[1]);
    pid_ = pid;
    out_fd_ = pipefd[0];
}

ChildProcess::~ChildProcess() {
    terminate();
    if (out_fd_ >= 0) close(out_fd_);
}

ChildProcess::ChildProcess(ChildProcess&& o) noexcept
    : pid_(std::exchange(o.pid_, -1)),
      out_fd_(std::exchange(o.out_fd_, -1)),
      line_buf_(std::move(o.line_buf_)) {}

ChildProcess& ChildProcess::operator=(ChildProcess&& o) noexcept {
    if (this != &o) {
        terminate();
        if (out_fd_ >= 0) close(out_fd_);
        pid_ = std::exchange(o.pid_, -1);
        out_fd_ = std::exchange(o.out_fd_, -1);
        line_buf_ = std::move(o.line_buf_);
    }
    return *this;
}

std::string ChildProcess::read_line() {
    while (true) {
        const auto nl = line_buf_.find('\n');
        if (nl != std::string::npos) {
            std::string line = line_buf_.substr(0, nl);
            line_buf_.erase(0, nl + 1);
            return line;
        }
        char buf[512];
        const ssize_t r = read(out_fd_, buf, sizeof(buf));
        if (r <= 0) {
            std::string rest = std::move(line_buf_);
            line_buf_.clear();
            return rest;
        }
        line_buf_.append(buf, std::size_t(r));
    }
}

bool ChildProcess::alive() const {
    if (pid_ < 0) return false;
    return kill(pid_, 0) == 0;
}

void ChildProcess::terminate() {
    if (pid_ < 0) return;
    kill(pid_, SIGTERM);
    int status = 0;
    // Escalate if the child ignores SIGTERM.
    for (int i = 0; i < 50; ++i) {
        if (waitpid(pid_, &status, WNOHANG) == pid_) {
            pid_ = -1;
            return;
        }
        usleep(20000);
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
    pid_ = -1;
}

int ChildProcess::wait() {
    if (pid_ < 0) return -1;
    int status = 0;
    waitpid(pid_, &status, 0);
    pid_ = -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -WTERMSIG(status);
}

std::string self_exe_dir() {
    char buf[4096];
    const ssize_t n = readlink("/proc/self/exe", buf, sizeof(buf) - 1);
    if (n <= 0) throw TablexError(ErrorCode::IoError, "cannot resolve /proc/self/exe");
    buf[n] = '\0';
    std::string path(buf);
    const auto slash = path.rfind('/');
    return path.substr(0, slash);
}

}  // namespace tablex
