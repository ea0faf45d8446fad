#include "contam/remote_oracle.h"

#include <condition_variable>
#include <csignal>
#include <cstring>
#include <future>
#include <map>
#include <thread>

#include <fcntl.h>
#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "contam/error.h"
#include "contam/parallel.h"
#include "fd_io.h"

namespace contam {

namespace detail {

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace detail

namespace {

using protocol::Op;
using protocol::Request;
using protocol::Response;

class SubprocessChannel : public LineChannel {
 public:
  explicit SubprocessChannel(const std::string& command) {
    detail::ignore_sigpipe();
    int to_child[2], from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0)
      throw TransportError(command, std::string("pipe: ") + std::strerror(errno));
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw TransportError(command, std::string("pipe: ") + std::strerror(errno));
    }
    pid_ = ::fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]})
        ::close(fd);
      throw TransportError(command, std::string("fork: ") + std::strerror(errno));
    }
    if (pid_ == 0) {
      // Own process group, so a kill also reaches children of the shell.
      ::setpgid(0, 0);
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::setpgid(pid_, pid_);
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    reader_ = std::make_unique<detail::FdLineReader>(read_fd_);
    label_ = command;
  }

  ~SubprocessChannel() override {
    shutdown();
    reap();
    if (read_fd_ >= 0) ::close(read_fd_);
  }

  void write_line(std::string_view line) override {
    std::string framed(line);
    framed.push_back('\n');
    if (write_fd_ < 0 || !detail::write_all(write_fd_, framed))
      throw TransportError(label_, "write to oracle process failed");
  }

  bool read_line(std::string& line) override { return reader_->read_line(line); }

  void shutdown() override {
    std::lock_guard lock(mu_);
    if (write_fd_ >= 0) {
      ::close(write_fd_);
      write_fd_ = -1;
    }
    if (pid_ > 0 && !reaped_) {
      // Give a well-behaved child a moment to exit on EOF.
      for (int i = 0; i < 20; ++i) {
        int status = 0;
        if (::waitpid(pid_, &status, WNOHANG) == pid_) {
          reaped_ = true;
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
      }
      ::kill(-pid_, SIGKILL);
    }
  }

 private:
  void reap() {
    std::lock_guard lock(mu_);
    if (pid_ > 0 && !reaped_) {
      int status = 0;
      ::waitpid(pid_, &status, 0);
      reaped_ = true;
    }
  }

  std::mutex mu_;
  pid_t pid_ = -1;
  bool reaped_ = false;
  int write_fd_ = -1;
  int read_fd_ = -1;
  std::unique_ptr<detail::FdLineReader> reader_;
  std::string label_;
};

class TcpChannel : public LineChannel {
 public:
  TcpChannel(const std::string& host, std::uint16_t port) {
    detail::ignore_sigpipe();
    label_ = host + ":" + std::to_string(port);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(),
                                 &hints, &res);
    if (rc != 0)
      throw TransportError(label_, std::string("resolve: ") + ::gai_strerror(rc));
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC,
                              ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        fd_ = fd;
        break;
      }
      ::close(fd);
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw TransportError(label_, "connection refused");
    reader_ = std::make_unique<detail::FdLineReader>(fd_);
  }

  ~TcpChannel() override {
    shutdown();
    ::close(fd_);
  }

  void write_line(std::string_view line) override {
    std::string framed(line);
    framed.push_back('\n');
    if (!detail::write_all(fd_, framed))
      throw TransportError(label_, "write to oracle socket failed");
  }

  bool read_line(std::string& line) override { return reader_->read_line(line); }

  void shutdown() override { ::shutdown(fd_, SHUT_RDWR); }

 private:
  int fd_ = -1;
  std::unique_ptr<detail::FdLineReader> reader_;
  std::string label_;
};

}  // namespace

std::string Endpoint::describe() const {
  return kind == Kind::kCommand ? "cmd:" + command
                                : "tcp:" + host + ":" + std::to_string(port);
}

Endpoint parse_endpoint(const std::string& spec) {
  Endpoint ep;
  if (spec.rfind("cmd:", 0) == 0) {
    ep.kind = Endpoint::Kind::kCommand;
    ep.command = spec.substr(4);
    if (ep.command.empty()) throw ConfigError("empty command in '" + spec + "'");
    return ep;
  }
  if (spec.rfind("tcp:", 0) == 0) {
    const auto rest = spec.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0)
      throw ConfigError("expected tcp:<host>:<port>, got '" + spec + "'");
    ep.kind = Endpoint::Kind::kTcp;
    ep.host = rest.substr(0, colon);
    const auto port = rest.substr(colon + 1);
    try {
      std::size_t used = 0;
      const auto v = std::stoul(port, &used);
      if (used != port.size() || v == 0 || v > 65535)
        throw std::out_of_range(port);
      ep.port = static_cast<std::uint16_t>(v);
    } catch (const std::logic_error&) {
      throw ConfigError("bad port in '" + spec + "'");
    }
    return ep;
  }
  throw ConfigError("unknown remote endpoint '" + spec + "'");
}

std::unique_ptr<LineChannel> open_channel(const Endpoint& endpoint) {
  if (endpoint.kind == Endpoint::Kind::kCommand)
    return std::make_unique<SubprocessChannel>(endpoint.command);
  return std::make_unique<TcpChannel>(endpoint.host, endpoint.port);
}

// One live stream plus the reader thread that routes responses by id.
class RemoteOracle::Connection {
 public:
  Connection(std::unique_ptr<LineChannel> channel, std::string label)
      : channel_(std::move(channel)), label_(std::move(label)) {
    reader_ = std::thread([this] { reader_loop(); });
  }

  ~Connection() {
    channel_->shutdown();
    reader_.join();
  }

  std::future<Response> send(const Request& request) {
    std::future<Response> fut;
    {
      std::lock_guard lock(mu_);
      if (failed_) throw TransportError(label_, failure_);
      auto [it, inserted] = pending_.try_emplace(request.id);
      if (!inserted) throw TransportError(label_, "duplicate request id");
      fut = it->second.get_future();
    }
    try {
      std::lock_guard lock(write_mu_);
      channel_->write_line(protocol::serialize(request));
    } catch (const TransportError& e) {
      fail(e.what());
    }
    return fut;
  }

  void fail(const std::string& why) {
    std::map<std::uint64_t, std::promise<Response>> orphaned;
    {
      std::lock_guard lock(mu_);
      if (!failed_) {
        failed_ = true;
        failure_ = why;
      }
      orphaned.swap(pending_);
    }
    for (auto& [id, p] : orphaned)
      p.set_exception(std::make_exception_ptr(TransportError(label_, failure_)));
  }

  bool failed() const {
    std::lock_guard lock(mu_);
    return failed_;
  }

 private:
  void reader_loop() {
    std::string line;
    while (channel_->read_line(line)) {
      Response resp;
      try {
        resp = protocol::parse_response(line);
      } catch (const protocol::ParseError& e) {
        fail(std::string("malformed response line: ") + e.what());
        return;
      }
      if (!resp.id) {
        fail("protocol error from oracle: " + resp.error.value_or("?"));
        return;
      }
      std::promise<Response> p;
      {
        std::lock_guard lock(mu_);
        const auto it = pending_.find(*resp.id);
        if (it == pending_.end()) {
          failed_ = true;
          failure_ = "response for unknown id " + std::to_string(*resp.id);
          break;
        }
        p = std::move(it->second);
        pending_.erase(it);
      }
      p.set_value(std::move(resp));
    }
    fail("connection closed by oracle");
  }

  std::unique_ptr<LineChannel> channel_;
  std::string label_;
  std::thread reader_;
  mutable std::mutex mu_;
  std::mutex write_mu_;
  std::map<std::uint64_t, std::promise<Response>> pending_;
  bool failed_ = false;
  std::string failure_;
};

RemoteOracle::RemoteOracle(Endpoint endpoint, RemoteOptions options)
    : endpoint_(std::move(endpoint)),
      options_(options),
      label_(endpoint_.describe()),
      name_(label_),
      in_flight_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, options.max_in_flight))) {}

RemoteOracle::~RemoteOracle() {
  std::lock_guard lock(conn_mu_);
  conn_.reset();
}

std::unique_ptr<RemoteOracle> RemoteOracle::connect(const Endpoint& endpoint,
                                                    const RemoteOptions& options) {
  std::unique_ptr<RemoteOracle> oracle(new RemoteOracle(endpoint, options));
  std::lock_guard lock(oracle->conn_mu_);
  oracle->conn_ = oracle->open_connection();
  return oracle;
}

std::shared_ptr<RemoteOracle::Connection> RemoteOracle::open_connection() {
  auto conn = std::make_shared<Connection>(open_channel(endpoint_), label_);
  ++connections_opened_;

  Request meta;
  meta.id = next_id_++;
  meta.op = Op::kMeta;
  auto fut = conn->send(meta);
  if (fut.wait_for(options_.meta_timeout) != std::future_status::ready) {
    conn->fail("meta handshake timed out");
    throw TransportError(label_, "meta handshake timed out after " +
                                     std::to_string(options_.meta_timeout.count()) +
                                     " ms");
  }
  const Response resp = fut.get();
  if (resp.error) throw SemanticError(label_, "meta refused: " + *resp.error);
  if (!resp.name || !resp.context_length)
    throw SemanticError(label_, "meta response lacks name or context_length");
  // Identity is fixed by the first handshake; reconnects only re-validate.
  if (connections_opened_ == 1) {
    name_ = *resp.name;
    context_length_ = static_cast<std::size_t>(*resp.context_length);
    scores_first_token_ = resp.scores_first_token;
  }
  return conn;
}

std::shared_ptr<RemoteOracle::Connection> RemoteOracle::current_connection() {
  std::lock_guard lock(conn_mu_);
  return conn_;
}

std::shared_ptr<RemoteOracle::Connection> RemoteOracle::reconnect(
    const std::shared_ptr<Connection>& stale) {
  std::lock_guard lock(conn_mu_);
  if (conn_ != stale && conn_ && !conn_->failed()) return conn_;
  conn_.reset();
  conn_ = open_connection();
  return conn_;
}

Response RemoteOracle::call(Request request, std::chrono::milliseconds timeout) {
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{in_flight_};

  std::string last_error;
  auto conn = current_connection();
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    try {
      if (!conn || conn->failed()) conn = reconnect(conn);
      request.id = next_id_++;
      auto fut = conn->send(request);
      if (fut.wait_for(timeout) != std::future_status::ready) {
        conn->fail("request timed out");
        throw TransportError(name_, "request timed out after " +
                                        std::to_string(timeout.count()) + " ms");
      }
      Response resp = fut.get();
      if (resp.error) throw SemanticError(name_, *resp.error);
      return resp;
    } catch (const TransportError& e) {
      last_error = e.what();
    }
  }
  throw TransportError(name_, "giving up after " +
                                  std::to_string(options_.max_retries + 1) +
                                  " attempts: " + last_error);
}

double RemoteOracle::score(std::string_view text) {
  Request req;
  req.op = Op::kLogprob;
  req.text = std::string(text);
  const Response resp = call(std::move(req), options_.logprob_timeout);
  if (!resp.logprob)
    throw SemanticError(name_, "logprob response lacks \"logprob\"");
  return *resp.logprob;
}

std::vector<double> RemoteOracle::score_batch(std::span<const std::string> texts) {
  std::vector<double> out(texts.size());
  parallel_for(texts.size(), options_.max_in_flight,
               [&](std::size_t i) { out[i] = score(texts[i]); });
  return out;
}

std::vector<double> RemoteOracle::score_batch_request(
    std::span<const std::string> texts) {
  Request req;
  req.op = Op::kLogprobBatch;
  req.texts.assign(texts.begin(), texts.end());
  const Response resp = call(std::move(req), options_.logprob_timeout);
  if (!resp.logprobs || resp.logprobs->size() != texts.size())
    throw SemanticError(name_, "logprob_batch response has wrong length");
  return *resp.logprobs;
}

}  // namespace contam
