#pragma once

// Line-oriented I/O over raw file descriptors, shared by the remote oracle
// client and the protocol server.

#include <cerrno>
#include <cstddef>
#include <string>
#include <string_view>

#include <unistd.h>

namespace contam::detail {

// Ignores SIGPIPE process-wide so a dead peer shows up as EPIPE.
void ignore_sigpipe();

// Returns false on any write error.
inline bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

class FdLineReader {
 public:
  explicit FdLineReader(int fd) : fd_(fd) {}

  // Next line without its '\n'. A final unterminated fragment is returned
  // as a line. False at end of stream or on error.
  bool read_line(std::string& line) {
    for (;;) {
      const auto nl = buf_.find('\n', scan_from_);
      if (nl != std::string::npos) {
        line.assign(buf_, 0, nl);
        buf_.erase(0, nl + 1);
        scan_from_ = 0;
        return true;
      }
      scan_from_ = buf_.size();
      char chunk[65536];
      const ssize_t n = ::read(fd_, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        if (buf_.empty()) return false;
        line.swap(buf_);
        buf_.clear();
        scan_from_ = 0;
        return true;
      }
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buf_;
  std::size_t scan_from_ = 0;
};

}  // namespace contam::detail
