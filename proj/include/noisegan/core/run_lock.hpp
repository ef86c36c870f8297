#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "noisegan/core/error.hpp"

namespace noisegan {

// Exclusive lock on a run directory, held for the object's lifetime.
class RunLock {
 public:
  explicit RunLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
    std::filesystem::create_directories(dir);
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      if (errno == EEXIST) {
        std::string owner;
        std::ifstream(path_) >> owner;
        throw IoError("run directory " + dir.string() + " is locked by process " + (owner.empty() ? "?" : owner) +
                      " (delete " + path_.string() + " if that process is gone)");
      }
      throw IoError("cannot lock " + dir.string() + ": " + std::strerror(errno));
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
  }

  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

  ~RunLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }

 private:
  std::filesystem::path path_;
};

}  // namespace noisegan
