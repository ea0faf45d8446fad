#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contam/oracle.h"
#include "contam/protocol.h"

namespace contam {

struct RemoteOptions {
  std::chrono::milliseconds meta_timeout{10'000};
  std::chrono::milliseconds logprob_timeout{600'000};
  std::size_t max_in_flight = 64;
  // Transport failures are retried on a fresh connection this many times.
  int max_retries = 2;
};

struct Endpoint {
  enum class Kind { kCommand, kTcp } kind = Kind::kCommand;
  std::string command;
  std::string host;
  std::uint16_t port = 0;

  std::string describe() const;
};

// "cmd:<shell command>" or "tcp:<host>:<port>". Throws ConfigError.
Endpoint parse_endpoint(const std::string& spec);

// A bidirectional stream of LF-terminated lines.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  // Throws TransportError.
  virtual void write_line(std::string_view line) = 0;
  // False at end of stream.
  virtual bool read_line(std::string& line) = 0;
  // Unblocks a concurrent read_line() and releases the peer.
  virtual void shutdown() = 0;
};

// Spawns `/bin/sh -c command` (stdin/stdout piped) or connects over TCP.
std::unique_ptr<LineChannel> open_channel(const Endpoint& endpoint);

// Oracle behind the JSON-lines protocol. Concurrent score() calls are
// pipelined over one connection and matched back by id, so responses may
// arrive in any order.
class RemoteOracle : public LogProbOracle {
 public:
  // Connects and performs the meta handshake. Throws TransportError on
  // timeout or a dead endpoint, SemanticError when meta is refused or lacks
  // name/context_length.
  static std::unique_ptr<RemoteOracle> connect(const Endpoint& endpoint,
                                               const RemoteOptions& options = {});
  ~RemoteOracle() override;

  std::string name() const override { return name_; }
  std::size_t context_length() const override { return context_length_; }
  std::optional<bool> scores_first_token() const { return scores_first_token_; }

  double score(std::string_view text) override;

  // One "logprob" request per text from up to max_in_flight workers.
  std::vector<double> score_batch(std::span<const std::string> texts) override;

  // One "logprob_batch" request for all texts.
  std::vector<double> score_batch_request(std::span<const std::string> texts);

  // Number of connections opened so far (1 + reconnects).
  std::size_t connections_opened() const { return connections_opened_; }

  class Connection;

 private:
  RemoteOracle(Endpoint endpoint, RemoteOptions options);

  std::shared_ptr<Connection> current_connection();
  std::shared_ptr<Connection> reconnect(const std::shared_ptr<Connection>& stale);
  std::shared_ptr<Connection> open_connection();
  protocol::Response call(protocol::Request request,
                          std::chrono::milliseconds timeout);

  Endpoint endpoint_;
  RemoteOptions options_;
  std::string label_;
  std::string name_;
  std::size_t context_length_ = 0;
  std::optional<bool> scores_first_token_;

  std::mutex conn_mu_;
  std::shared_ptr<Connection> conn_;
  std::atomic<std::uint64_t> next_id_{1};
  std::atomic<std::size_t> connections_opened_{0};
  std::counting_semaphore<> in_flight_;
};

}  // namespace contam
