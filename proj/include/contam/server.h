#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "contam/oracle.h"

namespace contam {

// Answers one protocol request line. Malformed requests get an error
// response carrying the id when it was readable, otherwise an id-less
// protocol-error line. Oracle failures become error responses.
std::string handle_request_line(LogProbOracle& oracle, std::string_view line);

// Serves requests read from in_fd, in arrival order, until end of stream.
void serve_fd(LogProbOracle& oracle, int in_fd, int out_fd);

// Protocol server over TCP; one thread per client connection.
class TcpServer {
 public:
  // port 0 picks a free port. Binds 127.0.0.1 unless `any_address`.
  TcpServer(LogProbOracle& oracle, std::uint16_t port, bool any_address = false);
  ~TcpServer();

  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const { return port_; }

  // Accept loop; returns after stop().
  void run();
  void stop();

 private:
  LogProbOracle& oracle_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::vector<std::thread> clients_;
  std::mutex fds_mu_;
  std::vector<int> client_fds_;
};

}  // namespace contam
