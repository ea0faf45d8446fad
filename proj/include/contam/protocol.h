#pragma once

// JSON-lines wire protocol spoken between the core and remote oracles.
//
// Framing: one JSON object per line, UTF-8, terminated by a single LF.
// Canonical serialization (what this library emits, and what the protocol
// vectors in tests/data/protocol_vectors.json pin): keys in lexicographic
// order, no insignificant whitespace, non-ASCII characters written raw,
// doubles in shortest round-trip form. Parsers ignore unknown fields.
//
//   request   {"id":<u64>,"op":"meta"}
//             {"id":<u64>,"op":"logprob","text":<string>}
//             {"id":<u64>,"op":"logprob_batch","texts":[<string>...]}
//   response  {"context_length":<int>,"id":<u64>,"name":<string>}
//             {"id":<u64>,"logprob":<double>}
//             {"id":<u64>,"logprobs":[<double>...]}
//             {"error":<string>,"id":<u64>}
//
// A meta response may also carry "scores_first_token" (bool). An error line
// without an id is a protocol-level failure of the whole connection.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace contam::protocol {

enum class Op { kMeta, kLogprob, kLogprobBatch };

std::string_view op_name(Op op);

struct Request {
  std::uint64_t id = 0;
  Op op = Op::kMeta;
  std::string text;                // kLogprob
  std::vector<std::string> texts;  // kLogprobBatch

  bool operator==(const Request&) const = default;
};

struct Response {
  std::optional<std::uint64_t> id;
  // meta
  std::optional<std::string> name;
  std::optional<std::int64_t> context_length;
  std::optional<bool> scores_first_token;
  // logprob / logprob_batch
  std::optional<double> logprob;
  std::optional<std::vector<double>> logprobs;
  // failure
  std::optional<std::string> error;

  bool operator==(const Response&) const = default;
};

// Raised for lines that are not valid protocol messages.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::optional<std::uint64_t> id = {})
      : std::runtime_error(message), id_(id) {}

  // Set when the id itself was readable.
  std::optional<std::uint64_t> id() const { return id_; }

 private:
  std::optional<std::uint64_t> id_;
};

std::string serialize(const Request& request);
std::string serialize(const Response& response);

// Throw ParseError.
Request parse_request(std::string_view line);
Response parse_response(std::string_view line);

}  // namespace contam::protocol
