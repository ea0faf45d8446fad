#include "contam/remote_oracle.h"

#include <thread>

#include <gtest/gtest.h>

#include "contam/corpus.h"
#include "contam/error.h"
#include "contam/hash.h"
#include "contam/ngram.h"
#include "contam/result_io.h"
#include "contam/server.h"
#include "contam/stats.h"
#include "test_util.h"

namespace contam {
namespace {

using namespace std::chrono_literals;

Endpoint mock(const std::string& flags = "") {
  return parse_endpoint(std::string("cmd:") + MOCK_ORACLE_BIN + " " + flags);
}

// Formula used by the mock when it has no model.
double mock_score(const std::string& text) {
  return -0.75 * static_cast<double>(text.size()) -
         static_cast<double>(fnv1a64(text) % 1024) / 1024.0;
}

std::vector<std::string> texts(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(synthetic::sentence(77, i));
  return out;
}

TEST(Endpoint, Parsing) {
  EXPECT_EQ(parse_endpoint("cmd:python3 serve.py").command, "python3 serve.py");
  const auto tcp = parse_endpoint("tcp:127.0.0.1:9000");
  EXPECT_EQ(tcp.kind, Endpoint::Kind::kTcp);
  EXPECT_EQ(tcp.host, "127.0.0.1");
  EXPECT_EQ(tcp.port, 9000);
  EXPECT_THROW(parse_endpoint("cmd:"), ConfigError);
  EXPECT_THROW(parse_endpoint("tcp:host"), ConfigError);
  EXPECT_THROW(parse_endpoint("tcp:host:70000"), ConfigError);
  EXPECT_THROW(parse_endpoint("udp:host:1"), ConfigError);
}

TEST(RemoteOracle, MetaHandshakePopulatesIdentity) {
  auto o = RemoteOracle::connect(
      mock("--name gpt-mini --context-length 2048 --scores-first-token false"));
  EXPECT_EQ(o->name(), "gpt-mini");
  EXPECT_EQ(o->context_length(), 2048u);
  ASSERT_TRUE(o->scores_first_token().has_value());
  EXPECT_FALSE(*o->scores_first_token());
  EXPECT_EQ(o->score("hello"), mock_score("hello"));
  EXPECT_EQ(o->connections_opened(), 1u);
}

TEST(RemoteOracle, HundredPipelinedRequestsAnsweredInReverse) {
  RemoteOptions opts;
  opts.max_in_flight = 100;
  auto o = RemoteOracle::connect(mock("--reverse 100"), opts);
  const auto t = texts(100);
  const auto scores = o->score_batch(t);
  ASSERT_EQ(scores.size(), 100u);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(scores[i], mock_score(t[i])) << i;
}

TEST(RemoteOracle, BatchRequestMatchesSingles) {
  auto o = RemoteOracle::connect(mock());
  const auto t = texts(17);
  const auto batch = o->score_batch_request(t);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(batch[i], o->score(t[i]));
}

TEST(RemoteOracle, ErrorResponseIsSemanticAndConnectionSurvives) {
  auto o = RemoteOracle::connect(mock("--error-on forbidden"));
  EXPECT_THROW(o->score("a forbidden text"), SemanticError);
  EXPECT_EQ(o->score("fine"), mock_score("fine"));
  EXPECT_EQ(o->connections_opened(), 1u);
}

TEST(RemoteOracle, DeadProcessFailsAfterRetries) {
  RemoteOptions opts;
  opts.max_retries = 2;
  auto o = RemoteOracle::connect(mock("--die-after 0"), opts);
  try {
    o->score("x");
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_NE(std::string(e.what()).find("giving up after 3 attempts"), std::string::npos)
        << e.what();
  }
  EXPECT_EQ(o->connections_opened(), 3u);
}

TEST(RemoteOracle, RetryRecoversOnFreshConnection) {
  testing::TempDir dir;
  auto o = RemoteOracle::connect(
      mock("--die-after 2 --die-once " + testing::quote((dir / "died").string())));
  EXPECT_EQ(o->score("a"), mock_score("a"));
  EXPECT_EQ(o->score("b"), mock_score("b"));
  EXPECT_EQ(o->score("c"), mock_score("c"));  // first process dies here
  EXPECT_EQ(o->connections_opened(), 2u);
  EXPECT_EQ(o->name(), "mock");
}

TEST(RemoteOracle, MalformedLineFailsConnection) {
  RemoteOptions opts;
  opts.max_retries = 0;
  auto o = RemoteOracle::connect(mock("--garbage-after 1"), opts);
  EXPECT_EQ(o->score("a"), mock_score("a"));
  EXPECT_THROW(o->score("b"), TransportError);
}

TEST(RemoteOracle, MetaWithoutNameIsRejected) {
  EXPECT_THROW(RemoteOracle::connect(mock("--no-name")), SemanticError);
}

TEST(RemoteOracle, HandshakeTimeout) {
  RemoteOptions opts;
  opts.meta_timeout = 200ms;
  const auto start = std::chrono::steady_clock::now();
  EXPECT_THROW(RemoteOracle::connect(mock("--meta-delay-ms 3000"), opts), TransportError);
  EXPECT_LT(std::chrono::steady_clock::now() - start, 2500ms);
}

TEST(RemoteOracle, RequestTimeout) {
  RemoteOptions opts;
  opts.logprob_timeout = 100ms;
  opts.max_retries = 0;
  auto o = RemoteOracle::connect(mock("--delay-ms 1000"), opts);
  EXPECT_THROW(o->score("slow"), TransportError);
}

TEST(RemoteOracle, MissingCommandIsTransportFailure) {
  EXPECT_THROW(RemoteOracle::connect(parse_endpoint("cmd:/nonexistent/oracle-binary")),
               TransportError);
}

TEST(RemoteOracle, TcpTransport) {
  auto model = std::make_shared<const NGramModel>(
      NGramModel::train(synthetic::documents(1, 200), 4, 0.1));
  NGramOracle local(model, "ngram:tcp", 0);
  TcpServer server(local, 0);
  std::thread serving([&] { server.run(); });
  {
    auto o = RemoteOracle::connect(
        parse_endpoint("tcp:127.0.0.1:" + std::to_string(server.port())));
    EXPECT_EQ(o->name(), "ngram:tcp");
    const auto t = texts(40);
    const auto remote = o->score_batch(t);
    const auto batch = o->score_batch_request(t);
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_EQ(remote[i], local.score(t[i]));
      EXPECT_EQ(batch[i], remote[i]);
    }
    EXPECT_THROW(o->score(""), SemanticError);
  }
  const auto port = server.port();
  server.stop();
  serving.join();
  RemoteOptions opts;
  opts.max_retries = 0;
  EXPECT_THROW(
      RemoteOracle::connect(parse_endpoint("tcp:127.0.0.1:" + std::to_string(port)), opts),
      TransportError);
}

TEST(RemoteOracle, ServerAnswersMalformedRequests) {
  testing::FunctionOracle o([](std::string_view) { return -1.0; }, "f");
  EXPECT_EQ(handle_request_line(o, "nonsense").rfind("{\"error\":\"protocol error", 0), 0u);
  EXPECT_NE(handle_request_line(o, R"({"id":5,"op":"zap"})").find("\"id\":5"),
            std::string::npos);
  EXPECT_EQ(handle_request_line(o, R"({"id":6,"op":"logprob","text":"x"})"),
            R"({"id":6,"logprob":-1.0})");
}

TEST(RemoteOracle, ShardedTestMatchesBuiltinBitForBit) {
  testing::TempDir dir;
  const auto model = NGramModel::train(synthetic::documents(2, 500), 5, 0.1);
  model.save(dir / "m.bin");
  auto builtin = std::make_shared<const NGramModel>(model);
  NGramOracle local(builtin, "ngram:m");
  auto remote = RemoteOracle::connect(
      mock("--name ngram:m --model " + testing::quote((dir / "m.bin").string())));
  const auto data = synthetic::dataset("d", 9, 60);
  TestConfig cfg{TestKind::kSharded, 10, 7, 5, kDefaultPFloor};
  EXPECT_EQ(to_json(sharded_test(data, local, cfg)).dump(),
            to_json(sharded_test(data, *remote, cfg, 3)).dump());
}

TEST(RemoteOracle, MidRunDeathAbortsWithPartialResult) {
  RemoteOptions opts;
  opts.max_retries = 1;
  auto remote = RemoteOracle::connect(mock("--die-after 0"), opts);
  const auto data = synthetic::dataset("d", 9, 40);
  TestConfig cfg{TestKind::kSharded, 4, 3, 5, kDefaultPFloor};
  try {
    sharded_test(data, *remote, cfg);
    FAIL();
  } catch (const TestAborted& e) {
    EXPECT_TRUE(e.transport_failure());
    EXPECT_TRUE(e.partial().shards.empty());
    EXPECT_TRUE(e.partial().error.has_value());
  }
}

}  // namespace
}  // namespace contam
