#include "contam/protocol.h"

#include <cmath>
#include <cstring>
#include <fstream>

#include <gtest/gtest.h>
#include <json.hpp>

namespace contam::protocol {
namespace {

using nlohmann::json;

json vectors() {
  std::ifstream in(std::string(TEST_DATA_DIR) + "/protocol_vectors.json");
  return json::parse(in);
}

Request request_from(const json& f) {
  Request r;
  r.id = f.at("id").get<std::uint64_t>();
  const auto op = f.at("op").get<std::string>();
  r.op = op == "meta" ? Op::kMeta : op == "logprob" ? Op::kLogprob : Op::kLogprobBatch;
  if (f.contains("text")) r.text = f["text"].get<std::string>();
  if (f.contains("texts")) r.texts = f["texts"].get<std::vector<std::string>>();
  return r;
}

Response response_from(const json& f) {
  Response r;
  if (f.contains("id")) r.id = f["id"].get<std::uint64_t>();
  if (f.contains("name")) r.name = f["name"].get<std::string>();
  if (f.contains("context_length")) r.context_length = f["context_length"].get<std::int64_t>();
  if (f.contains("scores_first_token"))
    r.scores_first_token = f["scores_first_token"].get<bool>();
  if (f.contains("logprob")) r.logprob = f["logprob"].get<double>();
  if (f.contains("logprobs")) r.logprobs = f["logprobs"].get<std::vector<double>>();
  if (f.contains("error")) r.error = f["error"].get<std::string>();
  return r;
}

TEST(ProtocolVectors, RequestsSerializeBitExact) {
  const auto v = vectors();
  ASSERT_GE(v["requests"].size(), 5u);
  for (const auto& c : v["requests"]) {
    const auto line = c["line"].get<std::string>();
    const auto req = request_from(c["fields"]);
    EXPECT_EQ(serialize(req), line);
    EXPECT_EQ(parse_request(line), req) << line;
  }
}

TEST(ProtocolVectors, ResponsesSerializeBitExact) {
  const auto v = vectors();
  ASSERT_GE(v["responses"].size(), 10u);
  for (const auto& c : v["responses"]) {
    const auto line = c["line"].get<std::string>();
    const auto resp = response_from(c["fields"]);
    EXPECT_EQ(serialize(resp), line);
    const auto parsed = parse_response(line);
    EXPECT_EQ(parsed, resp) << line;
    if (resp.logprob) {
      // Bit-identical doubles, including the sign of zero.
      EXPECT_EQ(std::signbit(*parsed.logprob), std::signbit(*resp.logprob));
    }
  }
}

TEST(ProtocolVectors, ToleratedLinesParse) {
  const auto v = vectors();
  for (const auto& c : v["tolerated_requests"])
    EXPECT_EQ(parse_request(c["line"].get<std::string>()), request_from(c["fields"]));
  for (const auto& c : v["tolerated_responses"])
    EXPECT_EQ(parse_response(c["line"].get<std::string>()), response_from(c["fields"]));
}

TEST(ProtocolVectors, InvalidLinesAreRejected) {
  const auto v = vectors();
  for (const auto& c : v["invalid_requests"])
    EXPECT_THROW(parse_request(c.get<std::string>()), ParseError) << c;
  for (const auto& c : v["invalid_responses"])
    EXPECT_THROW(parse_response(c.get<std::string>()), ParseError) << c;
}

TEST(Protocol, ParseErrorKeepsReadableId) {
  try {
    parse_request(R"({"id":12,"op":"generate"})");
    FAIL();
  } catch (const ParseError& e) {
    ASSERT_TRUE(e.id().has_value());
    EXPECT_EQ(*e.id(), 12u);
  }
  try {
    parse_request("{");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_FALSE(e.id().has_value());
  }
}

TEST(Protocol, RoundTripArbitraryDoubles) {
  std::uint64_t x = 0x243f6a8885a308d3ULL;
  for (int i = 0; i < 2000; ++i) {
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    double d;
    std::memcpy(&d, &x, sizeof d);
    if (!std::isfinite(d)) continue;
    Response r;
    r.id = static_cast<std::uint64_t>(i);
    r.logprob = d;
    const auto back = parse_response(serialize(r));
    ASSERT_EQ(std::memcmp(&*back.logprob, &d, sizeof d), 0) << serialize(r);
  }
}

TEST(Protocol, NonFiniteScoresCannotBeSent) {
  Response r;
  r.id = 1;
  r.logprob = -INFINITY;
  EXPECT_THROW(serialize(r), std::invalid_argument);
  EXPECT_EQ(op_name(Op::kLogprobBatch), "logprob_batch");
}

}  // namespace
}  // namespace contam::protocol
