// contam: command-line front end for contamination audits and experiments.
//
// Exit codes: 0 success, 1 some experiment rows failed, 2 usage or
// configuration error, 3 oracle or transport failure.

#include <glob.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "contam/aggregate.h"
#include "contam/corpus.h"
#include "contam/dataset.h"
#include "contam/error.h"
#include "contam/harness.h"
#include "contam/hash.h"
#include "contam/ngram.h"
#include "contam/oracle.h"
#include "contam/parallel.h"
#include "contam/remote_oracle.h"
#include "contam/result_io.h"
#include "contam/server.h"
#include "contam/stats.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace contam {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitRowErrors = 1;
constexpr int kExitUsage = 2;
constexpr int kExitOracle = 3;

std::string fmt(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", d);
  return buf;
}

// Prints the fully resolved configuration before any work starts.
void print_config(const std::string& command,
                  const std::vector<std::pair<std::string, std::string>>& fields) {
  std::cout << command << " config:";
  for (const auto& [k, v] : fields) std::cout << ' ' << k << '=' << v;
  std::cout << '\n' << std::flush;
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<fs::path> out;
  if (rc == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  globfree(&g);
  if (out.empty()) throw ConfigError("no files match '" + pattern + "'");
  return out;  // glob() sorts
}

std::vector<std::uint64_t> parse_u64_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad integer '" + item + "' in list '" + s + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::string join(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string verdict(double p, double alpha) {
  const std::string a = "α=" + fmt(alpha);
  if (p >= alpha) return "no evidence at " + a;
  std::string v = "flags contamination at " + a;
  // Within a factor of ten of the cutoff the evidence is weak.
  if (p * 10.0 > alpha) v += " (borderline, interpret with caution)";
  return v;
}

// ---------------------------------------------------------------------------

struct AuditArgs {
  std::string dataset;
  std::string oracle;
  std::string test = "sharded";
  std::size_t shards = 50;
  std::size_t permutations = 250;
  std::uint64_t seed = 42;
  std::size_t max_examples = 5000;
  std::size_t jobs = default_jobs();
  double alpha = 0.05;
  std::string out;
  bool timing = false;
  RemoteOptions remote;
  long meta_timeout_ms = 10'000;
  long logprob_timeout_ms = 600'000;
};

int cmd_audit(AuditArgs a) {
  TestConfig config;
  config.kind = parse_test_kind(a.test);
  config.num_shards = a.shards;
  config.num_permutations = a.permutations;
  config.master_seed = a.seed;
  a.remote.meta_timeout = std::chrono::milliseconds(a.meta_timeout_ms);
  a.remote.logprob_timeout = std::chrono::milliseconds(a.logprob_timeout_ms);
  print_config("audit", {{"dataset", a.dataset},
                         {"oracle", a.oracle},
                         {"test", to_string(config.kind)},
                         {"shards", std::to_string(a.shards)},
                         {"permutations", std::to_string(a.permutations)},
                         {"seed", std::to_string(a.seed)},
                         {"max_examples", std::to_string(a.max_examples)},
                         {"jobs", std::to_string(a.jobs)},
                         {"alpha", fmt(a.alpha)},
                         {"out", a.out}});
  config.validate();
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw ConfigError("--alpha must be in (0, 1)");

  const auto dataset = load_dataset(a.dataset, a.max_examples);
  auto oracle = open_oracle(a.oracle, a.remote);
  const ResultWriteOptions write_opts{a.timing};

  TestResult result;
  try {
    result = run_test(dataset, *oracle, config, a.jobs);
  } catch (const TestAborted& e) {
    write_json_file(a.out, to_json(e.partial(), write_opts));
    std::cerr << "error: " << e.what() << "\npartial result written to " << a.out
              << '\n';
    return kExitOracle;
  }
  write_json_file(a.out, to_json(result, write_opts));

  std::cout << "dataset: " << result.dataset << " (" << result.num_examples
            << " examples)\n"
            << "oracle: " << result.oracle << '\n';
  if (result.kind == TestKind::kSharded)
    std::cout << "t=" << fmt(result.t_statistic) << " df=" << result.degrees_of_freedom
              << '\n';
  else
    std::cout << "exceed_count=" << result.exceed_count << " of "
              << result.permuted_logprobs.size() << '\n';
  std::cout << "p-value: " << result.p_value << '\n'
            << "verdict: " << verdict(result.p_value, a.alpha) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AggregateArgs {
  std::string target;
  std::vector<std::string> controls;
  double threshold = 0.05;
  std::string out;
  std::string ecdf_out;
};

struct LoadedResults {
  std::string oracle;
  std::map<std::string, double> p_values;
};

LoadedResults load_results(const std::string& pattern) {
  LoadedResults loaded;
  for (const auto& path : expand_glob(pattern)) {
    TestResult r;
    try {
      r = test_result_from_json(read_json_file(path));
    } catch (const Error& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    if (r.error) throw DataError(path.string() + ": result is from an aborted run");
    if (!loaded.p_values.emplace(r.dataset, r.p_value).second)
      throw DataError(path.string() + ": duplicate dataset '" + r.dataset + "'");
    if (loaded.oracle.empty()) loaded.oracle = r.oracle;
    else if (loaded.oracle != r.oracle) loaded.oracle = pattern;
  }
  return loaded;
}

int cmd_aggregate(const AggregateArgs& a) {
  std::string controls;
  for (const auto& c : a.controls) controls += (controls.empty() ? "" : ";") + c;
  const std::string ecdf_path =
      a.ecdf_out.empty() ? fs::path(a.out).replace_extension(".ecdf.csv").string()
                         : a.ecdf_out;
  print_config("aggregate", {{"target", a.target},
                             {"control", controls.empty() ? "none" : controls},
                             {"threshold", fmt(a.threshold)},
                             {"out", a.out},
                             {"ecdf", ecdf_path}});
  const auto target = load_results(a.target);
  AggregateResult agg;
  if (a.controls.empty()) {
    std::vector<NamedPValue> named;
    for (const auto& [name, p] : target.p_values) named.push_back({name, p});
    agg = fisher_combine(named);
  } else {
    std::vector<ControlSet> sets;
    std::map<std::string, int> seen;
    for (const auto& pattern : a.controls) {
      auto loaded = load_results(pattern);
      std::string name = loaded.oracle;
      if (const int n = seen[name]++) name += "#" + std::to_string(n + 1);
      sets.push_back({name, std::move(loaded.p_values)});
    }
    agg = filtered_aggregate(target.p_values, sets, a.threshold);
  }
  write_json_file(a.out, to_json(agg));
  std::vector<double> included;
  for (const auto& c : agg.components) included.push_back(c.p_value);
  write_text_file(ecdf_path, ecdf_csv(ecdf(included)));

  std::cout << "included: " << agg.components.size() << " excluded: "
            << agg.excluded.size() << '\n';
  for (const auto& e : agg.excluded)
    std::cout << "  excluded " << e.name << ": " << e.reason << '\n';
  std::cout << "fisher X2=" << fmt(agg.fisher_statistic)
            << " df=" << agg.degrees_of_freedom << " p=" << agg.combined_p << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string corpus;
  int order = 5;
  double alpha = 0.1;
  int max_order = NGramModel::kDefaultMaxOrder;
  std::string out;
};

int cmd_ngram_train(const TrainArgs& a) {
  const auto source = parse_corpus_source(a.corpus);
  print_config("ngram train", {{"corpus", source.to_string()},
                               {"order", std::to_string(a.order)},
                               {"alpha", fmt(a.alpha)},
                               {"max_order", std::to_string(a.max_order)},
                               {"out", a.out}});
  const auto model =
      NGramModel::train(load_corpus(source), a.order, a.alpha, a.max_order);
  model.save(a.out);
  std::cout << "entries: " << model.num_entries() << '\n'
            << "model hash: " << hex64(fnv1a64(model.serialize())) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CanaryArgs {
  std::string config;
  std::string out_dir;
  std::size_t jobs = default_jobs();
};

int cmd_canary_run(const CanaryArgs& a) {
  auto config = canary_config_from_json(read_json_file(a.config));
  if (!a.out_dir.empty()) config.output_dir = a.out_dir;
  if (config.output_dir.empty()) config.output_dir = "canary_out";
  config.jobs = a.jobs;
  print_config("canary run", {{"config", a.config},
                              {"out_dir", config.output_dir.string()},
                              {"jobs", std::to_string(a.jobs)},
                              {"config_hash", config.hash()}});
  std::cout << config.to_json().dump() << '\n' << std::flush;

  const auto report = run_canary_experiment(config);
  for (const auto& s : report.summary)
    std::cout << s.test << ' ' << s.role << " dup=" << s.dup << " runs=" << s.count
              << " median_log10_p=" << fmt(s.median_log10_p) << '\n';
  std::cout << "rows: " << report.rows.size() << " failed: " << report.failed_rows
            << "\nwrote " << (config.output_dir / "results.csv").string() << '\n';
  return report.failed_rows ? kExitRowErrors : kExitOk;
}

// ---------------------------------------------------------------------------

struct CalibrateArgs {
  std::string corpus = "synthetic:seed=7,docs=50000";
  std::string model;
  int order = 5;
  double alpha = 0.1;
  std::size_t runs = 200;
  std::size_t dataset_size = 200;
  std::string test = "sharded";
  std::size_t shards = 50;
  std::size_t permutations = 51;
  std::uint64_t seed = 42;
  std::size_t jobs = default_jobs();
  std::string out;
};

int cmd_calibrate(const CalibrateArgs& a) {
  CalibrationConfig c;
  c.background = parse_corpus_source(a.corpus);
  c.order = a.order;
  c.alpha = a.alpha;
  c.runs = a.runs;
  c.dataset_size = a.dataset_size;
  c.test.kind = parse_test_kind(a.test);
  c.test.num_shards = a.shards;
  c.test.num_permutations = a.permutations;
  c.seed = a.seed;
  c.jobs = a.jobs;
  print_config("calibrate",
               {{"corpus", a.model.empty() ? c.background.to_string() : "unused"},
                {"model", a.model.empty() ? "trained from corpus" : a.model},
                {"order", std::to_string(a.order)},
                {"alpha", fmt(a.alpha)},
                {"runs", std::to_string(a.runs)},
                {"dataset_size", std::to_string(a.dataset_size)},
                {"test", to_string(c.test.kind)},
                {"shards", std::to_string(a.shards)},
                {"permutations", std::to_string(a.permutations)},
                {"seed", std::to_string(a.seed)},
                {"jobs", std::to_string(a.jobs)},
                {"out", a.out}});
  c.validate();
  const auto report =
      a.model.empty()
          ? run_null_calibration(c)
          : run_null_calibration(
                c, std::make_shared<const NGramModel>(NGramModel::load(a.model)));
  write_json_file(a.out, to_json(report, c));
  std::cout << "KS D=" << fmt(report.ks_statistic)
            << " (critical value at 0.05: " << fmt(report.ks_critical_value) << ")\n";
  for (const auto& [alpha, f] : report.fraction_below)
    std::cout << "fraction p<" << fmt(alpha) << ": " << fmt(f) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string axis = "permutations";
  std::string values;
  std::size_t fixed = 50;
  std::vector<std::string> datasets;
  std::string oracle;
  std::string seeds = "1";
  std::size_t jobs = default_jobs();
  std::string out_dir;
};

int cmd_sweep(const SweepArgs& a) {
  SweepConfig c;
  if (a.axis == "shards") c.axis = SweepAxis::kShards;
  else if (a.axis == "permutations") c.axis = SweepAxis::kPermutations;
  else throw ConfigError("--axis must be shards or permutations");
  for (auto v : parse_u64_list(a.values)) c.values.push_back(v);
  c.fixed = a.fixed;
  c.seeds = parse_u64_list(a.seeds);
  c.jobs = a.jobs;
  std::string ds;
  for (const auto& d : a.datasets) ds += (ds.empty() ? "" : ";") + d;
  print_config("sweep", {{"axis", a.axis},
                         {"values", a.values},
                         {"fixed", std::to_string(a.fixed)},
                         {"dataset", ds},
                         {"oracle", a.oracle},
                         {"seeds", join(c.seeds)},
                         {"jobs", std::to_string(a.jobs)},
                         {"out_dir", a.out_dir}});
  for (const auto& d : a.datasets) c.datasets.push_back(load_dataset(d));
  c.validate();
  auto oracle = open_oracle(a.oracle);
  const auto report = sensitivity_sweep(c, *oracle);
  write_text_file(fs::path(a.out_dir) / "sweep.csv", sweep_rows_csv(report));
  write_json_file(fs::path(a.out_dir) / "sweep.json", to_json(report));
  for (const auto& [v, m] : report.mean_log10_p)
    std::cout << a.axis << '=' << v << " mean_log10_p=" << fmt(m) << '\n';
  for (const auto& r : report.rows)
    if (r.skipped)
      std::cout << "skipped " << a.axis << '=' << r.value << " on " << r.dataset << ": "
                << r.reason << '\n';
  if (report.argmin) std::cout << "argmin: " << *report.argmin << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ServeArgs {
  std::string model;
  std::string name;
  std::size_t context_length = 0;
  int tcp_port = -1;
};

int cmd_serve(const ServeArgs& a) {
  auto model = std::make_shared<const NGramModel>(NGramModel::load(a.model));
  const std::string name =
      a.name.empty() ? "ngram:" + fs::path(a.model).stem().string() : a.name;
  NGramOracle oracle(model, name, a.context_length);
  if (a.tcp_port < 0) {
    serve_fd(oracle, 0, 1);
    return kExitOk;
  }
  TcpServer server(oracle, static_cast<std::uint16_t>(a.tcp_port));
  std::cerr << "listening on 127.0.0.1:" << server.port() << std::endl;
  server.run();
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct NormalizeArgs {
  std::string in;
  std::string out;
  std::size_t max_examples = 0;
};

int cmd_dataset_normalize(const NormalizeArgs& a) {
  print_config("dataset normalize", {{"in", a.in},
                                     {"out", a.out},
                                     {"max_examples", std::to_string(a.max_examples)}});
  const auto ds = load_dataset(
      a.in, a.max_examples ? std::optional<std::size_t>(a.max_examples) : std::nullopt);
  write_dataset_jsonl(ds, a.out);
  std::cout << "examples: " << ds.size() << '\n';
  return kExitOk;
}

struct SynthArgs {
  std::uint64_t seed = 42;
  std::size_t size = 200;
  std::string name = "synthetic";
  std::string out;
};

int cmd_dataset_synthetic(const SynthArgs& a) {
  print_config("dataset synthetic", {{"seed", std::to_string(a.seed)},
                                     {"size", std::to_string(a.size)},
                                     {"name", a.name},
                                     {"out", a.out}});
  if (a.size < 1) throw ConfigError("--size must be >= 1");
  write_dataset_jsonl(synthetic::dataset(a.name, a.seed, a.size), a.out);
  return kExitOk;
}

int guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const TestAborted& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOracle;
  } catch (const OracleError& e) {
    std::cerr << "error: oracle failure: " << e.what() << '\n';
    return kExitOracle;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace
}  // namespace contam

int main(int argc, char** argv) {
  using namespace contam;
  CLI::App app{"Black-box test-set contamination audits via exchangeability tests."};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 ok, 1 some rows failed, 2 usage/config error, "
             "3 oracle/transport failure.");
  std::function<int()> action;

  AuditArgs audit;
  auto* a = app.add_subcommand("audit", "Test one dataset against one oracle.");
  a->add_option("--dataset", audit.dataset, "Dataset file (.jsonl/.json or one example per line)")
      ->required();
  a->add_option("--oracle", audit.oracle,
                "builtin:ngram=<model-file>, cmd:<shell command> or tcp:<host>:<port>")
      ->required();
  a->add_option("--test", audit.test, "sharded or permutation")->capture_default_str();
  a->add_option("--shards", audit.shards, "Shards (sharded test)")->capture_default_str();
  a->add_option("--permutations", audit.permutations,
                "Permutations per shard (sharded) or in total (permutation)")
      ->capture_default_str();
  a->add_option("--seed", audit.seed, "Master seed")->capture_default_str();
  a->add_option("--max-examples", audit.max_examples, "Read at most this many examples")
      ->capture_default_str();
  a->add_option("--jobs", audit.jobs, "Worker threads (default: logical CPUs)")
      ->capture_default_str();
  a->add_option("--alpha", audit.alpha, "Significance level for the verdict line")
      ->capture_default_str();
  a->add_option("--out", audit.out, "TestResult JSON output")->required();
  a->add_flag("--timing", audit.timing, "Include wall time in the result file");
  a->add_option("--meta-timeout-ms", audit.meta_timeout_ms, "Remote handshake timeout")
      ->capture_default_str();
  a->add_option("--logprob-timeout-ms", audit.logprob_timeout_ms,
                "Remote scoring timeout per request")
      ->capture_default_str();
  a->add_option("--max-in-flight", audit.remote.max_in_flight,
                "Pipelined remote requests")
      ->capture_default_str();
  a->add_option("--retries", audit.remote.max_retries,
                "Reconnect attempts after a transport failure")
      ->capture_default_str();
  a->callback([&] { action = [&] { return cmd_audit(audit); }; });

  AggregateArgs agg;
  auto* g = app.add_subcommand("aggregate",
                               "Fisher-combine TestResult p-values, optionally "
                               "excluding datasets flagged on control models.");
  g->add_option("--target", agg.target, "Glob of target TestResult files")->required();
  g->add_option("--control", agg.controls,
                "Glob of control TestResult files (repeatable; default: none)");
  g->add_option("--threshold", agg.threshold, "Control p below this excludes a dataset")
      ->capture_default_str();
  g->add_option("--out", agg.out, "AggregateResult JSON output")->required();
  g->add_option("--ecdf", agg.ecdf_out,
                "ECDF CSV of included p-values (default: <out>.ecdf.csv)");
  g->callback([&] { action = [&] { return cmd_aggregate(agg); }; });

  TrainArgs train;
  auto* ng = app.add_subcommand("ngram", "Byte-level n-gram models.");
  ng->require_subcommand(1);
  auto* t = ng->add_subcommand("train", "Train and save an n-gram model.");
  t->add_option("--corpus", train.corpus,
                "Text file (documents split at blank lines) or synthetic:seed=N,docs=M")
      ->required();
  t->add_option("--order", train.order, "n-gram order")->capture_default_str();
  t->add_option("--alpha", train.alpha, "Lidstone smoothing")->capture_default_str();
  t->add_option("--max-order", train.max_order, "Largest order accepted")
      ->capture_default_str();
  t->add_option("--out", train.out, "Model file")->required();
  t->callback([&] { action = [&] { return cmd_ngram_train(train); }; });

  CanaryArgs canary;
  auto* c = app.add_subcommand("canary", "Canary contamination experiments.");
  c->require_subcommand(1);
  auto* cr = c->add_subcommand("run", "Run an experiment from a JSON config.");
  cr->add_option("--config", canary.config, "Experiment JSON")->required();
  cr->add_option("--out-dir", canary.out_dir,
                 "Output directory (default: config output_dir, else canary_out)");
  cr->add_option("--jobs", canary.jobs, "Worker threads (default: logical CPUs)")
      ->capture_default_str();
  cr->callback([&] { action = [&] { return cmd_canary_run(canary); }; });

  CalibrateArgs cal;
  auto* cb = app.add_subcommand("calibrate", "Null calibration on a clean model.");
  cb->add_option("--corpus", cal.corpus, "Background corpus for the clean model")
      ->capture_default_str();
  cb->add_option("--model", cal.model, "Use this trained model instead of --corpus");
  cb->add_option("--order", cal.order, "n-gram order")->capture_default_str();
  cb->add_option("--alpha", cal.alpha, "Lidstone smoothing")->capture_default_str();
  cb->add_option("--runs", cal.runs, "Fresh datasets to test (>= 100)")
      ->capture_default_str();
  cb->add_option("--dataset-size", cal.dataset_size, "Examples per dataset")
      ->capture_default_str();
  cb->add_option("--test", cal.test, "sharded or permutation")->capture_default_str();
  cb->add_option("--shards", cal.shards, "Shards")->capture_default_str();
  cb->add_option("--permutations", cal.permutations, "Permutations")
      ->capture_default_str();
  cb->add_option("--seed", cal.seed, "Master seed")->capture_default_str();
  cb->add_option("--jobs", cal.jobs, "Worker threads (default: logical CPUs)")
      ->capture_default_str();
  cb->add_option("--out", cal.out, "Calibration report JSON")->required();
  cb->callback([&] { action = [&] { return cmd_calibrate(cal); }; });

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "Sensitivity of the sharded test to shards "
                                         "or permutations.");
  sw->add_option("--axis", sweep.axis, "shards or permutations")->capture_default_str();
  sw->add_option("--values", sweep.values, "Comma-separated axis values")->required();
  sw->add_option("--fixed", sweep.fixed, "Value of the parameter not swept")
      ->capture_default_str();
  sw->add_option("--dataset", sweep.datasets, "Dataset file (repeatable)")->required();
  sw->add_option("--oracle", sweep.oracle, "Oracle specifier")->required();
  sw->add_option("--seeds", sweep.seeds, "Comma-separated master seeds")
      ->capture_default_str();
  sw->add_option("--jobs", sweep.jobs, "Worker threads (default: logical CPUs)")
      ->capture_default_str();
  sw->add_option("--out-dir", sweep.out_dir, "Writes sweep.csv and sweep.json")
      ->required();
  sw->callback([&] { action = [&] { return cmd_sweep(sweep); }; });

  ServeArgs serve;
  auto* sv = app.add_subcommand("serve", "Serve an n-gram model over the oracle "
                                         "protocol (stdio unless --tcp).");
  sv->add_option("--model", serve.model, "Model file")->required();
  sv->add_option("--name", serve.name, "Reported name (default: ngram:<file stem>)");
  sv->add_option("--context-length", serve.context_length,
                 "Strided scoring window in bytes; 0 scores exactly")
      ->capture_default_str();
  sv->add_option("--tcp", serve.tcp_port, "Listen on this port on 127.0.0.1 (0: any free)");
  sv->callback([&] { action = [&] { return cmd_serve(serve); }; });

  NormalizeArgs norm;
  auto* ds = app.add_subcommand("dataset", "Dataset utilities.");
  ds->require_subcommand(1);
  auto* dn = ds->add_subcommand("normalize", "Validate and rewrite a dataset as JSON-lines.");
  dn->add_option("--in", norm.in, "Input dataset")->required();
  dn->add_option("--out", norm.out, "Output .jsonl")->required();
  dn->add_option("--max-examples", norm.max_examples, "Read at most this many (0: all)")
      ->capture_default_str();
  dn->callback([&] { action = [&] { return cmd_dataset_normalize(norm); }; });

  SynthArgs synth;
  auto* dsy = ds->add_subcommand("synthetic",
                                 "Write a dataset of i.i.d. synthetic sentences.");
  dsy->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  dsy->add_option("--size", synth.size, "Number of examples")->capture_default_str();
  dsy->add_option("--name", synth.name, "Dataset name")->capture_default_str();
  dsy->add_option("--out", synth.out, "Output .jsonl")->required();
  dsy->callback([&] { action = [&] { return cmd_dataset_synthetic(synth); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  return guarded(action);
}
