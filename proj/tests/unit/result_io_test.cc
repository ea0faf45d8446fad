#include "contam/result_io.h"

#include <cmath>

#include <gtest/gtest.h>

#include "contam/aggregate.h"
#include "contam/error.h"
#include "test_util.h"

namespace contam {
namespace {

TestResult sharded_result() {
  TestResult r;
  r.kind = TestKind::kSharded;
  r.config = {TestKind::kSharded, 2, 3, 11, kDefaultPFloor};
  r.dataset = "bench";
  r.oracle = "ngram:m";
  r.num_examples = 5;
  r.shards = {{0, 0, 3, -10.5, -11.25, 0.75}, {1, 3, 5, -4.0, -3.5, -0.5}};
  r.mean = 0.125;
  r.std_dev = 0.8838834764831844;
  r.t_statistic = 0.2;
  r.degrees_of_freedom = 1;
  r.p_value = 0.4371;
  r.wall_time_seconds = 1.25;
  return r;
}

TEST(ResultIo, ShardedRoundTrip) {
  const auto r = sharded_result();
  const auto j = to_json(r);
  EXPECT_EQ(j["schema"], "contam.test_result");
  EXPECT_EQ(j["tool_version"], kToolVersion);
  EXPECT_EQ(j["status"], "ok");
  EXPECT_FALSE(j.contains("wall_time_seconds"));
  const auto back = test_result_from_json(j);
  EXPECT_EQ(back.dataset, r.dataset);
  EXPECT_EQ(back.p_value, r.p_value);
  ASSERT_EQ(back.shards.size(), 2u);
  EXPECT_EQ(back.shards[1].begin, 3u);
  EXPECT_EQ(back.shards[0].statistic, 0.75);
  EXPECT_EQ(back.config.master_seed, 11u);
  EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(ResultIo, TimingIsOptIn) {
  const auto j = to_json(sharded_result(), {true});
  EXPECT_EQ(j["wall_time_seconds"], 1.25);
}

TEST(ResultIo, PartialPermutationResultKeepsNaNs) {
  TestResult r;
  r.kind = TestKind::kPermutation;
  r.config.kind = TestKind::kPermutation;
  r.config.num_permutations = 3;
  r.canonical_logprob = -5.0;
  r.permuted_logprobs = {-6.0, std::nan(""), std::nan("")};
  r.error = "oracle died";
  const auto j = to_json(r);
  EXPECT_EQ(j["status"], "aborted");
  const auto back = test_result_from_json(j);
  ASSERT_TRUE(back.error.has_value());
  EXPECT_EQ(back.permuted_logprobs[0], -6.0);
  EXPECT_TRUE(std::isnan(back.permuted_logprobs[2]));
}

TEST(ResultIo, NonFiniteDoubles) {
  EXPECT_EQ(json_double(INFINITY), "Infinity");
  EXPECT_EQ(double_from_json(json_double(-INFINITY)), -INFINITY);
  EXPECT_TRUE(std::isnan(double_from_json("NaN")));
  EXPECT_THROW(double_from_json("x"), ConfigError);
}

TEST(ResultIo, AggregateRoundTrip) {
  const std::vector<double> p = {0.2, 0.03};
  auto agg = fisher_combine(p);
  agg.excluded = {{"mmlu_1", "control 'gpt2' p=0.001 < 0.05"}};
  agg.threshold = 0.05;
  const auto j = to_json(agg);
  EXPECT_EQ(j["schema"], "contam.aggregate_result");
  const auto back = aggregate_result_from_json(j);
  EXPECT_EQ(back.combined_p, agg.combined_p);
  EXPECT_EQ(back.excluded[0].reason, agg.excluded[0].reason);
  EXPECT_EQ(back.degrees_of_freedom, 4u);
}

TEST(ResultIo, RejectsForeignDocuments) {
  EXPECT_THROW(test_result_from_json(nlohmann::json{{"schema", "other"}}), ConfigError);
  auto j = to_json(sharded_result());
  j["schema_version"] = 99;
  EXPECT_THROW(test_result_from_json(j), ConfigError);
  j = to_json(sharded_result());
  j.erase("config");
  EXPECT_THROW(test_result_from_json(j), ConfigError);
}

TEST(ResultIo, FilesAreStable) {
  testing::TempDir dir;
  write_json_file(dir / "sub" / "r.json", to_json(sharded_result()));
  const auto text = testing::read_file(dir / "sub" / "r.json");
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(read_json_file(dir / "sub" / "r.json"), to_json(sharded_result()));
  EXPECT_THROW(read_json_file(dir / "missing.json"), ConfigError);
}

}  // namespace
}  // namespace contam
