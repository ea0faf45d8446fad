#include "contam/protocol.h"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace contam::protocol {
namespace {

using nlohmann::json;

json parse_object(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON line: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("protocol line is not a JSON object");
  return j;
}

std::optional<std::uint64_t> read_id(const json& j) {
  const auto it = j.find("id");
  if (it == j.end()) return std::nullopt;
  if (!it->is_number_unsigned())
    throw ParseError("\"id\" must be a non-negative integer");
  return it->get<std::uint64_t>();
}

double read_double(const json& v, const char* field,
                   std::optional<std::uint64_t> id) {
  if (!v.is_number())
    throw ParseError(std::string("\"") + field + "\" must be a number", id);
  const double d = v.get<double>();
  if (!std::isfinite(d))
    throw ParseError(std::string("\"") + field + "\" is not finite", id);
  return d;
}

void require_finite(double d) {
  if (!std::isfinite(d))
    throw std::invalid_argument("protocol: log-probabilities must be finite");
}

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::kMeta:
      return "meta";
    case Op::kLogprob:
      return "logprob";
    case Op::kLogprobBatch:
      return "logprob_batch";
  }
  return "?";
}

std::string serialize(const Request& request) {
  json j = {{"id", request.id}, {"op", op_name(request.op)}};
  if (request.op == Op::kLogprob) j["text"] = request.text;
  if (request.op == Op::kLogprobBatch) j["texts"] = request.texts;
  return j.dump();
}

std::string serialize(const Response& response) {
  json j = json::object();
  if (response.id) j["id"] = *response.id;
  if (response.name) j["name"] = *response.name;
  if (response.context_length) j["context_length"] = *response.context_length;
  if (response.scores_first_token)
    j["scores_first_token"] = *response.scores_first_token;
  if (response.logprob) {
    require_finite(*response.logprob);
    j["logprob"] = *response.logprob;
  }
  if (response.logprobs) {
    for (double d : *response.logprobs) require_finite(d);
    j["logprobs"] = *response.logprobs;
  }
  if (response.error) j["error"] = *response.error;
  return j.dump();
}

Request parse_request(std::string_view line) {
  const json j = parse_object(line);
  Request r;
  const auto id = read_id(j);
  if (!id) throw ParseError("request has no \"id\"");
  r.id = *id;

  const auto op = j.find("op");
  if (op == j.end() || !op->is_string())
    throw ParseError("request has no string \"op\"", id);
  const auto& name = op->get_ref<const std::string&>();
  if (name == "meta") {
    r.op = Op::kMeta;
  } else if (name == "logprob") {
    r.op = Op::kLogprob;
    const auto t = j.find("text");
    if (t == j.end() || !t->is_string())
      throw ParseError("logprob request needs string \"text\"", id);
    r.text = t->get<std::string>();
  } else if (name == "logprob_batch") {
    r.op = Op::kLogprobBatch;
    const auto t = j.find("texts");
    if (t == j.end() || !t->is_array())
      throw ParseError("logprob_batch request needs array \"texts\"", id);
    for (const auto& s : *t) {
      if (!s.is_string())
        throw ParseError("\"texts\" entries must be strings", id);
      r.texts.push_back(s.get<std::string>());
    }
  } else {
    throw ParseError("unknown op \"" + name + "\"", id);
  }
  return r;
}

Response parse_response(std::string_view line) {
  const json j = parse_object(line);
  Response r;
  r.id = read_id(j);

  if (auto it = j.find("error"); it != j.end()) {
    if (!it->is_string()) throw ParseError("\"error\" must be a string", r.id);
    r.error = it->get<std::string>();
  }
  if (auto it = j.find("name"); it != j.end()) {
    if (!it->is_string()) throw ParseError("\"name\" must be a string", r.id);
    r.name = it->get<std::string>();
  }
  if (auto it = j.find("context_length"); it != j.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
      throw ParseError("\"context_length\" must be a non-negative integer",
                       r.id);
    r.context_length = it->get<std::int64_t>();
  }
  if (auto it = j.find("scores_first_token"); it != j.end()) {
    if (!it->is_boolean())
      throw ParseError("\"scores_first_token\" must be a boolean", r.id);
    r.scores_first_token = it->get<bool>();
  }
  if (auto it = j.find("logprob"); it != j.end())
    r.logprob = read_double(*it, "logprob", r.id);
  if (auto it = j.find("logprobs"); it != j.end()) {
    if (!it->is_array()) throw ParseError("\"logprobs\" must be an array", r.id);
    std::vector<double> values;
    values.reserve(it->size());
    for (const auto& v : *it) values.push_back(read_double(v, "logprobs", r.id));
    r.logprobs = std::move(values);
  }

  if (!r.error && !r.name && !r.context_length && !r.logprob && !r.logprobs)
    throw ParseError("response carries no recognized payload", r.id);
  if (!r.id && !r.error) throw ParseError("response has no \"id\"");
  return r;
}

}  // namespace contam::protocol
