#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "contam/corpus.h"
#include "contam/ngram.h"
#include "contam/parallel.h"
#include "contam/stats.h"

namespace contam {

// ---------------------------------------------------------------------------
// Canary experiments

struct CanarySpec {
  std::string name;
  // Copies injected into the training corpus. 0 keeps the dataset out of
  // training entirely, which turns its rows into extra null controls.
  int dup = 1;
  std::size_t examples = 200;  // synthetic canaries
  std::optional<std::string> path;  // file canaries (used as-is every seed)
};

struct CanaryExperimentConfig {
  std::string name = "canary";
  // Synthetic backgrounds are re-seeded per experiment seed.
  CorpusSource background{CorpusSource::Kind::kSynthetic, 7, 50'000, {}};
  int order = 5;
  double alpha = 0.1;
  std::vector<CanarySpec> canaries;
  // Held-out dataset drawn like the canaries but never injected.
  std::optional<std::size_t> control_examples = 200;
  std::vector<TestConfig> tests;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir;
  std::size_t jobs = 1;

  // Desk-scale defaults: dup schedule {1, 2, 4, 7, 10, 50}; sharded test
  // with 50 shards x 51 permutations and a permutation test with 51
  // permutations; seeds 1..5.
  static CanaryExperimentConfig defaults();

  // Throws ConfigError.
  void validate() const;
  // Canonical JSON of every field that affects results (no output_dir/jobs).
  nlohmann::json to_json() const;
  std::string hash() const;
};

// Reads the JSON config format; unspecified fields keep their defaults and
// unknown fields are rejected. Throws ConfigError.
CanaryExperimentConfig canary_config_from_json(const nlohmann::json& j);

struct ExperimentRow {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string dataset;
  std::string role;  // "canary" or "control"
  int dup = 0;
  std::uint64_t dataset_seed = 0;
  std::string test;
  std::size_t shards = 0;
  std::size_t permutations = 0;
  std::uint64_t test_seed = 0;
  std::string status = "ok";  // "ok" or "error"
  std::string error;
  double p_value = 0.0;
  double log10_p = 0.0;
  double t_statistic = 0.0;
  std::string config_hash;
  std::string model_hash;
};

struct DupSummary {
  std::string test;
  std::string role;
  int dup = 0;
  std::size_t count = 0;
  double median_log10_p = 0.0;
};

struct CanaryReport {
  std::vector<ExperimentRow> rows;
  std::vector<DupSummary> summary;  // by (test, role, dup)
  std::size_t failed_rows = 0;

  // Median over ok rows, or nullopt when there are none.
  std::optional<double> median_log10_p(const std::string& test, int dup,
                                       const std::string& role = "canary") const;
};

std::vector<DupSummary> summarize_rows(const std::vector<ExperimentRow>& rows);

std::string rows_to_csv(const std::vector<ExperimentRow>& rows);
std::vector<ExperimentRow> rows_from_csv(const std::string& csv);
nlohmann::json summary_to_json(const CanaryReport& report,
                               const CanaryExperimentConfig& config);
std::string summary_svg(const CanaryReport& report);

// Trains one model per seed on background + injected canaries and runs every
// configured test on every canary and the control. Writes results.csv,
// summary.json and plot.svg when output_dir is set. Stage failures are
// recorded on the affected rows and the run continues.
CanaryReport run_canary_experiment(const CanaryExperimentConfig& config);

// ---------------------------------------------------------------------------
// Null calibration

struct CalibrationConfig {
  CorpusSource background{CorpusSource::Kind::kSynthetic, 7, 50'000, {}};
  int order = 5;
  double alpha = 0.1;
  std::size_t runs = 200;
  std::size_t dataset_size = 200;
  TestConfig test{TestKind::kSharded, 50, 51, 42, kDefaultPFloor};
  std::uint64_t seed = 42;
  std::size_t jobs = 1;

  void validate() const;
};

struct CalibrationReport {
  std::vector<double> p_values;
  double ks_statistic = 0.0;
  double ks_critical_value = 0.0;
  std::map<double, double> fraction_below;  // alpha -> fraction of p < alpha
  std::string model_hash;
};

// Trains one clean model, then tests `runs` fresh synthetic datasets that
// never appear in training. Requires runs >= 100.
CalibrationReport run_null_calibration(const CalibrationConfig& config);
// Same, against an already trained model.
CalibrationReport run_null_calibration(const CalibrationConfig& config,
                                       std::shared_ptr<const NGramModel> model);

nlohmann::json to_json(const CalibrationReport& report,
                       const CalibrationConfig& config);

// ---------------------------------------------------------------------------
// Sensitivity sweeps

enum class SweepAxis { kShards, kPermutations };

struct SweepConfig {
  SweepAxis axis = SweepAxis::kShards;
  std::vector<std::size_t> values;
  // The parameter that is not swept: permutations for a shard sweep, shards
  // for a permutation sweep.
  std::size_t fixed = 51;
  std::vector<ExampleDataset> datasets;
  std::vector<std::uint64_t> seeds{1};
  std::size_t jobs = 1;

  void validate() const;
};

struct SweepRow {
  std::size_t value = 0;
  std::string dataset;
  std::uint64_t seed = 0;
  std::uint64_t test_seed = 0;
  bool skipped = false;
  std::string reason;
  double p_value = 0.0;
  double log10_p = 0.0;
};

struct SweepReport {
  SweepAxis axis = SweepAxis::kShards;
  std::vector<SweepRow> rows;
  // Mean log10 p per axis value over non-skipped rows, in config order.
  std::vector<std::pair<std::size_t, double>> mean_log10_p;
  std::optional<std::size_t> argmin;
};

SweepReport sensitivity_sweep(const SweepConfig& config, LogProbOracle& oracle);

std::string sweep_rows_csv(const SweepReport& report);
nlohmann::json to_json(const SweepReport& report);

}  // namespace contam
