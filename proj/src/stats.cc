#include "contam/stats.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>

#include "contam/parallel.h"
#include "contam/special_functions.h"

namespace contam {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

[[noreturn]] void abort_with(TestResult partial, Clock::time_point start) {
  partial.wall_time_seconds = seconds_since(start);
  try {
    throw;
  } catch (const TransportError& e) {
    partial.error = e.what();
    throw TestAborted(std::move(partial), e.what(), true);
  } catch (const OracleError& e) {
    partial.error = e.what();
    throw TestAborted(std::move(partial), e.what(), false);
  }
}

}  // namespace

std::string to_string(TestKind kind) {
  return kind == TestKind::kSharded ? "sharded" : "permutation";
}

TestKind parse_test_kind(const std::string& s) {
  if (s == "sharded") return TestKind::kSharded;
  if (s == "permutation") return TestKind::kPermutation;
  throw ConfigError("unknown test kind '" + s +
                    "' (expected sharded or permutation)");
}

void TestConfig::validate() const {
  if (num_permutations < 1)
    throw ConfigError("num_permutations must be >= 1");
  if (kind == TestKind::kSharded && num_shards < 2)
    throw ConfigError("num_shards must be >= 2 for the sharded test");
  if (!(p_floor > 0.0) || p_floor >= 1.0)
    throw ConfigError("p_floor must lie in (0, 1)");
}

std::vector<double> TestResult::shard_stats() const {
  std::vector<double> out;
  out.reserve(shards.size());
  for (const auto& s : shards) out.push_back(s.statistic);
  return out;
}

std::size_t count_exceeding(double canonical,
                            std::span<const double> permuted) {
  return static_cast<std::size_t>(
      std::count_if(permuted.begin(), permuted.end(),
                    [canonical](double l) { return canonical < l; }));
}

double permutation_p_value(std::size_t exceed_count, std::size_t m) {
  return static_cast<double>(exceed_count + 1) / static_cast<double>(m + 1);
}

TTestOutcome one_sided_t_test(std::span<const double> stats, double p_floor) {
  if (stats.size() < 2)
    throw ConfigError("t-test needs at least two shard statistics");
  TTestOutcome out;
  const auto r = static_cast<double>(stats.size());
  double sum = 0.0;
  for (double s : stats) sum += s;
  out.mean = sum / r;
  double ss = 0.0;
  for (double s : stats) ss += (s - out.mean) * (s - out.mean);
  out.std_dev = std::sqrt(ss / (r - 1.0));
  out.degrees_of_freedom = stats.size() - 1;

  if (out.std_dev == 0.0) {
    if (out.mean > 0.0) {
      out.t_statistic = std::numeric_limits<double>::infinity();
      out.p_value = p_floor;
    } else {
      out.t_statistic = out.mean < 0.0 ? -std::numeric_limits<double>::infinity()
                                       : 0.0;
      out.p_value = 1.0;
    }
    return out;
  }
  out.t_statistic = out.mean * std::sqrt(r) / out.std_dev;
  const double p = t_sf(out.t_statistic,
                        static_cast<double>(out.degrees_of_freedom));
  out.p_value = std::clamp(p, p_floor, 1.0);
  return out;
}

TestResult permutation_test(const ExampleDataset& dataset,
                            LogProbOracle& oracle, const TestConfig& config,
                            std::size_t jobs) {
  config.validate();
  if (dataset.size() < 2)
    throw ConfigError("permutation test needs a dataset of >= 2 examples");
  const auto start = Clock::now();

  TestResult result;
  result.kind = TestKind::kPermutation;
  result.config = config;
  result.config.kind = TestKind::kPermutation;
  result.dataset = dataset.name();
  result.oracle = oracle.name();
  result.num_examples = dataset.size();

  const std::size_t m = config.num_permutations;
  const auto& examples = dataset.examples();
  // Slot 0 is the canonical order.
  std::vector<double> scores(m + 1, std::numeric_limits<double>::quiet_NaN());
  try {
    parallel_for(m + 1, jobs, [&](std::size_t i) {
      std::string text;
      if (i == 0) {
        text = seq(examples);
      } else {
        const auto perm =
            sample_permutation(examples.size(), config.master_seed, 0, i - 1);
        text = seq_permuted(examples, perm.mapping);
      }
      scores[i] = oracle.score(text);
    });
  } catch (const OracleError&) {
    result.canonical_logprob = scores[0];
    result.permuted_logprobs.assign(scores.begin() + 1, scores.end());
    abort_with(std::move(result), start);
  }

  result.canonical_logprob = scores[0];
  result.permuted_logprobs.assign(scores.begin() + 1, scores.end());
  result.exceed_count =
      count_exceeding(result.canonical_logprob, result.permuted_logprobs);
  result.p_value = std::max(permutation_p_value(result.exceed_count, m),
                            config.p_floor);
  result.wall_time_seconds = seconds_since(start);
  return result;
}

TestResult sharded_test(const ExampleDataset& dataset, LogProbOracle& oracle,
                        const TestConfig& config, std::size_t jobs) {
  config.validate();
  const auto plan = make_shard_plan(dataset.size(), config.num_shards);
  const auto start = Clock::now();

  TestResult result;
  result.kind = TestKind::kSharded;
  result.config = config;
  result.config.kind = TestKind::kSharded;
  result.dataset = dataset.name();
  result.oracle = oracle.name();
  result.num_examples = dataset.size();

  const std::size_t m = config.num_permutations;
  const auto& examples = dataset.examples();
  std::vector<std::optional<ShardRecord>> slots(plan.num_shards);
  try {
    parallel_for(plan.num_shards, jobs, [&](std::size_t i) {
      const auto [b, e] = plan.boundaries[i];
      const std::span<const Example> shard(examples.data() + b, e - b);
      std::vector<std::string> texts;
      texts.reserve(m + 1);
      texts.push_back(seq(shard));
      for (std::size_t j = 0; j < m; ++j) {
        const auto perm =
            sample_permutation(shard.size(), config.master_seed, i, j);
        texts.push_back(seq_permuted(shard, perm.mapping));
      }
      const auto scores = oracle.score_batch(texts);
      if (scores.size() != texts.size())
        throw TransportError(oracle.name(), "batch returned " +
                                                std::to_string(scores.size()) +
                                                " scores for " +
                                                std::to_string(texts.size()) +
                                                " texts");
      double sum = 0.0;
      for (std::size_t j = 1; j <= m; ++j) sum += scores[j];
      ShardRecord rec;
      rec.index = i;
      rec.begin = b;
      rec.end = e;
      rec.canonical_logprob = scores[0];
      rec.shuffled_mean_logprob = sum / static_cast<double>(m);
      rec.statistic = rec.canonical_logprob - rec.shuffled_mean_logprob;
      slots[i] = rec;
    });
  } catch (const OracleError&) {
    for (auto& s : slots)
      if (s) result.shards.push_back(*s);
    abort_with(std::move(result), start);
  }

  for (auto& s : slots) result.shards.push_back(*s);
  const auto stats = result.shard_stats();
  const auto t = one_sided_t_test(stats, config.p_floor);
  result.mean = t.mean;
  result.std_dev = t.std_dev;
  result.t_statistic = t.t_statistic;
  result.degrees_of_freedom = t.degrees_of_freedom;
  result.p_value = t.p_value;
  result.wall_time_seconds = seconds_since(start);
  return result;
}

TestResult run_test(const ExampleDataset& dataset, LogProbOracle& oracle,
                    const TestConfig& config, std::size_t jobs) {
  return config.kind == TestKind::kSharded
             ? sharded_test(dataset, oracle, config, jobs)
             : permutation_test(dataset, oracle, config, jobs);
}

}  // namespace contam
