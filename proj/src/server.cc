#include "contam/server.h"

#include <cerrno>
#include <cstring>
#include <mutex>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "contam/error.h"
#include "contam/protocol.h"
#include "fd_io.h"

namespace contam {

using protocol::Op;
using protocol::Request;
using protocol::Response;

std::string handle_request_line(LogProbOracle& oracle, std::string_view line) {
  Request req;
  try {
    req = protocol::parse_request(line);
  } catch (const protocol::ParseError& e) {
    Response err;
    err.id = e.id();
    err.error = std::string("protocol error: ") + e.what();
    return protocol::serialize(err);
  }

  Response resp;
  resp.id = req.id;
  try {
    switch (req.op) {
      case Op::kMeta:
        resp.name = oracle.name();
        resp.context_length = static_cast<std::int64_t>(oracle.context_length());
        break;
      case Op::kLogprob:
        if (req.text.empty()) throw SemanticError(oracle.name(), "empty text");
        resp.logprob = oracle.score(req.text);
        break;
      case Op::kLogprobBatch:
        for (const auto& t : req.texts)
          if (t.empty()) throw SemanticError(oracle.name(), "empty text in batch");
        resp.logprobs = oracle.score_batch(req.texts);
        break;
    }
    return protocol::serialize(resp);
  } catch (const std::exception& e) {
    Response err;
    err.id = req.id;
    err.error = e.what();
    return protocol::serialize(err);
  }
}

void serve_fd(LogProbOracle& oracle, int in_fd, int out_fd) {
  detail::ignore_sigpipe();
  detail::FdLineReader reader(in_fd);
  std::string line;
  while (reader.read_line(line)) {
    if (line.empty()) continue;
    if (!detail::write_all(out_fd, handle_request_line(oracle, line) + "\n"))
      return;
  }
}

TcpServer::TcpServer(LogProbOracle& oracle, std::uint16_t port, bool any_address)
    : oracle_(oracle) {
  detail::ignore_sigpipe();
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (listen_fd_ < 0)
    throw ConfigError(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(any_address ? INADDR_ANY : INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 16) != 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    throw ConfigError("cannot listen on port " + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
  stop();
  for (auto& t : clients_) t.join();
  for (int fd : client_fds_) ::close(fd);
  ::close(listen_fd_);
}

void TcpServer::run() {
  while (!stopping_) {
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;
    }
    if (stopping_) {
      ::close(fd);
      return;
    }
    {
      std::lock_guard lock(fds_mu_);
      client_fds_.push_back(fd);
    }
    clients_.emplace_back([this, fd] {
      serve_fd(oracle_, fd, fd);
      ::shutdown(fd, SHUT_RDWR);
    });
  }
}

void TcpServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  std::lock_guard lock(fds_mu_);
  for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
}

}  // namespace contam
