#pragma once

#include <string>
#include <vector>

namespace tablex {

// Child process with captured stdout; killed on destruction if still alive.
// Used to self-spawn registry/server processes for desk-scale runs.
class ChildProcess {
  public:
    ChildProcess() = default;
    explicit ChildProcess(const std::vector<std::string>& argv);
    ~ChildProcess();
    ChildProcess(ChildProcess&&) noexcept;
    ChildProcess& operator=(ChildProcess&&) noexcept;
    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    // Blocking line read from the child's stdout (empty string on EOF).
    std::string read_line();

    bool alive() const;
    void terminate();
    int wait();  // exit status

  private:
    int pid_ = -1;
    int out_fd_ = -1;
    std::string line_buf_;
};

// Directory containing the current executable (via /proc/self/exe).
std::string self_exe_dir();

}  // namespace tablex
