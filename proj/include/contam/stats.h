#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contam/dataset.h"
#include "contam/error.h"
#include "contam/oracle.h"

namespace contam {

enum class TestKind { kPermutation, kSharded };

std::string to_string(TestKind kind);
TestKind parse_test_kind(const std::string& s);

inline constexpr double kDefaultPFloor = 1e-38;

struct TestConfig {
  TestKind kind = TestKind::kSharded;
  std::size_t num_shards = 50;
  // Per shard for the sharded test; in total for the permutation test.
  std::size_t num_permutations = 250;
  std::uint64_t master_seed = 42;
  double p_floor = kDefaultPFloor;

  // Throws ConfigError.
  void validate() const;
};

struct ShardRecord {
  std::size_t index = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  double canonical_logprob = 0.0;
  double shuffled_mean_logprob = 0.0;
  double statistic = 0.0;  // canonical - shuffled mean
};

struct TestResult {
  TestKind kind = TestKind::kSharded;
  TestConfig config;
  std::string dataset;
  std::string oracle;
  std::size_t num_examples = 0;
  double p_value = 1.0;

  // Sharded test.
  std::vector<ShardRecord> shards;
  double mean = 0.0;
  double std_dev = 0.0;
  double t_statistic = 0.0;
  std::size_t degrees_of_freedom = 0;

  // Permutation test. Entries not yet scored (partial results) are NaN.
  double canonical_logprob = 0.0;
  std::vector<double> permuted_logprobs;
  std::size_t exceed_count = 0;

  double wall_time_seconds = 0.0;
  // Set when the run aborted; the fields above then hold what was finished.
  std::optional<std::string> error;

  std::vector<double> shard_stats() const;
};

// Thrown when the oracle fails mid-test. Carries everything scored so far.
class TestAborted : public Error {
 public:
  TestAborted(TestResult partial, const std::string& what, bool transport)
      : Error(what), partial_(std::move(partial)), transport_(transport) {}

  const TestResult& partial() const { return partial_; }
  bool transport_failure() const { return transport_; }

 private:
  TestResult partial_;
  bool transport_;
};

// #{i : canonical < permuted[i]}. Ties do not count.
std::size_t count_exceeding(double canonical, std::span<const double> permuted);

// (exceed_count + 1) / (m + 1).
double permutation_p_value(std::size_t exceed_count, std::size_t m);

struct TTestOutcome {
  double mean = 0.0;
  double std_dev = 0.0;
  double t_statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
};

// One-sided one-sample t-test of E[s] > 0: t = mean * sqrt(r) / sd with the
// r-1 denominator, p = t_sf(t, r-1) clamped to [p_floor, 1]. Sums run in
// index order. With sd = 0: p = p_floor when mean > 0, else 1.
// Requires at least two statistics.
TTestOutcome one_sided_t_test(std::span<const double> stats,
                              double p_floor = kDefaultPFloor);

// Scores seq(X) and m whole-dataset permutations (lineage: master_seed,
// shard 0, permutation j). Throws ConfigError or TestAborted.
TestResult permutation_test(const ExampleDataset& dataset,
                            LogProbOracle& oracle, const TestConfig& config,
                            std::size_t jobs = 1);

// Sharded rank comparison: per contiguous shard, canonical score minus the
// mean over m within-shard permutations (lineage: master_seed, shard i,
// permutation j), then one_sided_t_test over the shards. Throws ConfigError
// or TestAborted.
TestResult sharded_test(const ExampleDataset& dataset, LogProbOracle& oracle,
                        const TestConfig& config, std::size_t jobs = 1);

// Dispatches on config.kind.
TestResult run_test(const ExampleDataset& dataset, LogProbOracle& oracle,
                    const TestConfig& config, std::size_t jobs = 1);

}  // namespace contam
