#include "contam/result_io.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "contam/error.h"

namespace contam {

using nlohmann::json;

json json_double(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  return d;
}

double double_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
  }
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  throw ConfigError("expected a number in result file, got " + j.dump());
}

namespace {

json doubles(const std::vector<double>& v) {
  json a = json::array();
  for (double d : v) a.push_back(json_double(d));
  return a;
}

std::vector<double> doubles_from(const json& a) {
  std::vector<double> v;
  for (const auto& x : a) v.push_back(double_from_json(x));
  return v;
}

void check_schema(const json& j, const char* schema) {
  if (!j.is_object() || j.value("schema", "") != schema)
    throw ConfigError(std::string("not a ") + schema + " document");
  if (j.value("schema_version", 0) != kResultSchemaVersion)
    throw ConfigError(std::string(schema) + ": unsupported schema_version");
}

}  // namespace

json to_json(const TestResult& r, const ResultWriteOptions& options) {
  json j;
  j["schema"] = "contam.test_result";
  j["schema_version"] = kResultSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["status"] = r.error ? "aborted" : "ok";
  if (r.error) j["error"] = *r.error;
  j["test_kind"] = to_string(r.kind);
  j["config"] = {{"test_kind", to_string(r.config.kind)},
                 {"num_shards", r.config.num_shards},
                 {"num_permutations", r.config.num_permutations},
                 {"master_seed", r.config.master_seed},
                 {"p_floor", r.config.p_floor}};
  j["dataset"] = r.dataset;
  j["oracle"] = r.oracle;
  j["num_examples"] = r.num_examples;
  j["p_value"] = json_double(r.p_value);

  if (r.kind == TestKind::kSharded) {
    json shards = json::array();
    for (const auto& s : r.shards)
      shards.push_back({{"index", s.index},
                        {"begin", s.begin},
                        {"end", s.end},
                        {"canonical_logprob", json_double(s.canonical_logprob)},
                        {"shuffled_mean_logprob",
                         json_double(s.shuffled_mean_logprob)},
                        {"statistic", json_double(s.statistic)}});
    j["sharded"] = {{"shards", shards},
                    {"shard_stats", doubles(r.shard_stats())},
                    {"mean", json_double(r.mean)},
                    {"std", json_double(r.std_dev)},
                    {"t_statistic", json_double(r.t_statistic)},
                    {"degrees_of_freedom", r.degrees_of_freedom}};
  } else {
    j["permutation"] = {{"canonical_logprob", json_double(r.canonical_logprob)},
                        {"permuted_logprobs", doubles(r.permuted_logprobs)},
                        {"exceed_count", r.exceed_count}};
  }
  if (options.include_timing) j["wall_time_seconds"] = r.wall_time_seconds;
  return j;
}

TestResult test_result_from_json(const json& j) {
  check_schema(j, "contam.test_result");
  try {
    TestResult r;
    r.kind = parse_test_kind(j.at("test_kind").get<std::string>());
    const auto& c = j.at("config");
    r.config.kind = parse_test_kind(c.at("test_kind").get<std::string>());
    r.config.num_shards = c.at("num_shards").get<std::size_t>();
    r.config.num_permutations = c.at("num_permutations").get<std::size_t>();
    r.config.master_seed = c.at("master_seed").get<std::uint64_t>();
    r.config.p_floor = c.at("p_floor").get<double>();
    r.dataset = j.at("dataset").get<std::string>();
    r.oracle = j.at("oracle").get<std::string>();
    r.num_examples = j.at("num_examples").get<std::size_t>();
    r.p_value = double_from_json(j.at("p_value"));
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
    if (j.contains("wall_time_seconds"))
      r.wall_time_seconds = j.at("wall_time_seconds").get<double>();

    if (r.kind == TestKind::kSharded) {
      const auto& s = j.at("sharded");
      for (const auto& rec : s.at("shards")) {
        ShardRecord sr;
        sr.index = rec.at("index").get<std::size_t>();
        sr.begin = rec.at("begin").get<std::size_t>();
        sr.end = rec.at("end").get<std::size_t>();
        sr.canonical_logprob = double_from_json(rec.at("canonical_logprob"));
        sr.shuffled_mean_logprob =
            double_from_json(rec.at("shuffled_mean_logprob"));
        sr.statistic = double_from_json(rec.at("statistic"));
        r.shards.push_back(sr);
      }
      r.mean = double_from_json(s.at("mean"));
      r.std_dev = double_from_json(s.at("std"));
      r.t_statistic = double_from_json(s.at("t_statistic"));
      r.degrees_of_freedom = s.at("degrees_of_freedom").get<std::size_t>();
    } else {
      const auto& p = j.at("permutation");
      r.canonical_logprob = double_from_json(p.at("canonical_logprob"));
      r.permuted_logprobs = doubles_from(p.at("permuted_logprobs"));
      r.exceed_count = p.at("exceed_count").get<std::size_t>();
    }
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed test result: ") + e.what());
  }
}

json to_json(const AggregateResult& r) {
  json j;
  j["schema"] = "contam.aggregate_result";
  j["schema_version"] = kResultSchemaVersion;
  j["tool_version"] = kToolVersion;
  json comps = json::array();
  for (const auto& c : r.components)
    comps.push_back({{"name", c.name}, {"p_value", json_double(c.p_value)}});
  json excl = json::array();
  for (const auto& e : r.excluded)
    excl.push_back({{"name", e.name}, {"reason", e.reason}});
  j["components"] = comps;
  j["excluded"] = excl;
  j["num_components"] = r.components.size();
  j["fisher_statistic"] = json_double(r.fisher_statistic);
  j["degrees_of_freedom"] = r.degrees_of_freedom;
  j["combined_p"] = json_double(r.combined_p);
  j["threshold"] = r.threshold;
  return j;
}

AggregateResult aggregate_result_from_json(const json& j) {
  check_schema(j, "contam.aggregate_result");
  try {
    AggregateResult r;
    for (const auto& c : j.at("components"))
      r.components.push_back({c.at("name").get<std::string>(),
                              double_from_json(c.at("p_value"))});
    for (const auto& e : j.at("excluded"))
      r.excluded.push_back(
          {e.at("name").get<std::string>(), e.at("reason").get<std::string>()});
    r.fisher_statistic = double_from_json(j.at("fisher_statistic"));
    r.degrees_of_freedom = j.at("degrees_of_freedom").get<std::size_t>();
    r.combined_p = double_from_json(j.at("combined_p"));
    r.threshold = j.at("threshold").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed aggregate result: ") + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw ConfigError(path.string() + ": write failed");
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
}

}  // namespace contam
