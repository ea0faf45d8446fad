#include "contam/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "contam/aggregate.h"
#include "contam/hash.h"
#include "contam/result_io.h"
#include "contam/rng.h"

namespace contam {
namespace {

using nlohmann::json;

// Seed-lineage tags. Changing any of these changes every experiment output.
constexpr std::uint64_t kBackgroundTag = 0x62;
constexpr std::uint64_t kCanaryTag = 0x63;
constexpr std::uint64_t kControlTag = 0x64;
constexpr std::uint64_t kInjectTag = 0x65;
constexpr std::uint64_t kTestTag = 0x66;
constexpr std::uint64_t kCalibrationDataTag = 0x67;
constexpr std::uint64_t kCalibrationTestTag = 0x68;
constexpr std::uint64_t kSweepTag = 0x69;

std::string fmt_double(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double log10_p(double p) { return std::log10(p); }

json test_config_json(const TestConfig& t) {
  json j = {{"kind", to_string(t.kind)}, {"permutations", t.num_permutations}};
  if (t.kind == TestKind::kSharded) j["shards"] = t.num_shards;
  return j;
}

std::string model_hash(const NGramModel& model) {
  return hex64(fnv1a64(model.serialize()));
}

template <typename T>
T get_field(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }))
      throw ConfigError("unknown field '" + key + "' in " + where);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Canary experiments

CanaryExperimentConfig CanaryExperimentConfig::defaults() {
  CanaryExperimentConfig c;
  for (int dup : {1, 2, 4, 7, 10, 50})
    c.canaries.push_back({"dup" + std::to_string(dup), dup, 200, std::nullopt});
  c.tests = {TestConfig{TestKind::kSharded, 50, 51, 0, kDefaultPFloor},
             TestConfig{TestKind::kPermutation, 50, 51, 0, kDefaultPFloor}};
  c.seeds = {1, 2, 3, 4, 5};
  return c;
}

void CanaryExperimentConfig::validate() const {
  if (canaries.empty()) throw ConfigError("experiment needs at least one canary");
  if (seeds.empty()) throw ConfigError("experiment needs at least one seed");
  if (tests.empty()) throw ConfigError("experiment needs at least one test");
  std::set<std::string> names;
  for (const auto& c : canaries) {
    if (c.dup < 0) throw ConfigError("canary '" + c.name + "': dup must be >= 0");
    if (!c.path && c.examples < 2)
      throw ConfigError("canary '" + c.name + "': needs >= 2 examples");
    if (c.name.empty() || c.name == "control" || !names.insert(c.name).second)
      throw ConfigError("canary names must be unique, non-empty and not 'control'");
  }
  for (const auto& t : tests) t.validate();
  if (order < 1 || !(alpha > 0.0)) throw ConfigError("bad n-gram settings");
}

json CanaryExperimentConfig::to_json() const {
  json canaries_json = json::array();
  for (const auto& c : canaries) {
    json cj = {{"name", c.name}, {"dup", c.dup}};
    if (c.path) cj["path"] = *c.path;
    else cj["examples"] = c.examples;
    canaries_json.push_back(cj);
  }
  json tests_json = json::array();
  for (const auto& t : tests) tests_json.push_back(test_config_json(t));
  json j = {{"name", name},
            {"background", background.to_string()},
            {"order", order},
            {"alpha", alpha},
            {"canaries", canaries_json},
            {"tests", tests_json},
            {"seeds", seeds}};
  j["control"] = control_examples ? json{{"examples", *control_examples}} : json();
  return j;
}

std::string CanaryExperimentConfig::hash() const {
  return hex64(fnv1a64(to_json().dump()));
}

CanaryExperimentConfig canary_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  reject_unknown(j, {"name", "background", "order", "alpha", "canaries", "control",
                     "tests", "seeds", "output_dir"},
                 "experiment config");
  auto c = CanaryExperimentConfig::defaults();
  c.name = get_field<std::string>(j, "name", c.name);
  if (j.contains("background"))
    c.background = parse_corpus_source(get_field<std::string>(j, "background", ""));
  c.order = get_field<int>(j, "order", c.order);
  c.alpha = get_field<double>(j, "alpha", c.alpha);
  if (j.contains("canaries")) {
    c.canaries.clear();
    for (const auto& cj : j.at("canaries")) {
      reject_unknown(cj, {"name", "dup", "examples", "path"}, "canary entry");
      CanarySpec s;
      s.name = get_field<std::string>(cj, "name", "");
      s.dup = get_field<int>(cj, "dup", 1);
      s.examples = get_field<std::size_t>(cj, "examples", 200);
      if (cj.contains("path")) s.path = get_field<std::string>(cj, "path", "");
      if (s.name.empty())
        s.name = s.path ? std::filesystem::path(*s.path).stem().string()
                        : "dup" + std::to_string(s.dup);
      c.canaries.push_back(std::move(s));
    }
  }
  if (j.contains("control")) {
    const auto& cj = j.at("control");
    if (cj.is_null()) {
      c.control_examples.reset();
    } else {
      reject_unknown(cj, {"examples"}, "control entry");
      c.control_examples = get_field<std::size_t>(cj, "examples", 200);
    }
  }
  if (j.contains("tests")) {
    c.tests.clear();
    for (const auto& tj : j.at("tests")) {
      reject_unknown(tj, {"kind", "shards", "permutations"}, "test entry");
      TestConfig t;
      t.kind = parse_test_kind(get_field<std::string>(tj, "kind", "sharded"));
      t.num_shards = get_field<std::size_t>(tj, "shards", 50);
      t.num_permutations = get_field<std::size_t>(tj, "permutations", 51);
      c.tests.push_back(t);
    }
  }
  if (j.contains("seeds")) c.seeds = get_field<std::vector<std::uint64_t>>(j, "seeds", {});
  if (j.contains("output_dir"))
    c.output_dir = get_field<std::string>(j, "output_dir", "");
  c.validate();
  return c;
}

std::optional<double> CanaryReport::median_log10_p(const std::string& test, int dup,
                                                   const std::string& role) const {
  for (const auto& s : summary)
    if (s.test == test && s.dup == dup && s.role == role) return s.median_log10_p;
  return std::nullopt;
}

std::vector<DupSummary> summarize_rows(const std::vector<ExperimentRow>& rows) {
  std::map<std::tuple<std::string, std::string, int>, std::vector<double>> groups;
  for (const auto& r : rows)
    if (r.status == "ok") groups[{r.test, r.role, r.dup}].push_back(r.log10_p);
  std::vector<DupSummary> out;
  for (const auto& [key, values] : groups) {
    const auto& [test, role, dup] = key;
    out.push_back({test, role, dup, values.size(), median(values)});
  }
  return out;
}

static const char* kRowHeader =
    "experiment,seed,dataset,role,dup,dataset_seed,test,shards,permutations,"
    "test_seed,status,error,p_value,log10_p,t_statistic,config_hash,model_hash";

std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream os;
  os << kRowHeader << '\n';
  for (const auto& r : rows) {
    os << csv_field(r.experiment) << ',' << r.seed << ',' << csv_field(r.dataset)
       << ',' << r.role << ',' << r.dup << ',' << r.dataset_seed << ',' << r.test
       << ',' << r.shards << ',' << r.permutations << ',' << r.test_seed << ','
       << r.status << ',' << csv_field(r.error) << ',' << fmt_double(r.p_value)
       << ',' << fmt_double(r.log10_p) << ',' << fmt_double(r.t_statistic) << ','
       << r.config_hash << ',' << r.model_hash << '\n';
  }
  return os.str();
}

std::vector<ExperimentRow> rows_from_csv(const std::string& csv) {
  const auto table = parse_csv(csv);
  if (table.empty()) throw ConfigError("empty results CSV");
  std::vector<ExperimentRow> rows;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& f = table[i];
    if (f.size() != 17)
      throw ConfigError("results CSV row " + std::to_string(i) + " has " +
                        std::to_string(f.size()) + " fields");
    ExperimentRow r;
    r.experiment = f[0];
    r.seed = std::stoull(f[1]);
    r.dataset = f[2];
    r.role = f[3];
    r.dup = std::stoi(f[4]);
    r.dataset_seed = std::stoull(f[5]);
    r.test = f[6];
    r.shards = std::stoull(f[7]);
    r.permutations = std::stoull(f[8]);
    r.test_seed = std::stoull(f[9]);
    r.status = f[10];
    r.error = f[11];
    r.p_value = std::strtod(f[12].c_str(), nullptr);
    r.log10_p = std::strtod(f[13].c_str(), nullptr);
    r.t_statistic = std::strtod(f[14].c_str(), nullptr);
    r.config_hash = f[15];
    r.model_hash = f[16];
    rows.push_back(std::move(r));
  }
  return rows;
}

json summary_to_json(const CanaryReport& report,
                     const CanaryExperimentConfig& config) {
  json groups = json::array();
  for (const auto& s : report.summary)
    groups.push_back({{"test", s.test},
                      {"role", s.role},
                      {"dup", s.dup},
                      {"count", s.count},
                      {"median_log10_p", json_double(s.median_log10_p)}});
  return {{"schema", "contam.canary_summary"},
          {"schema_version", kResultSchemaVersion},
          {"tool_version", kToolVersion},
          {"experiment", config.name},
          {"config", config.to_json()},
          {"config_hash", config.hash()},
          {"rows", report.rows.size()},
          {"failed_rows", report.failed_rows},
          {"median_log10_p_by_dup", groups}};
}

std::string summary_svg(const CanaryReport& report) {
  constexpr double kW = 640, kH = 400, kPad = 50;
  std::vector<int> dups;
  std::set<std::string> tests;
  double lo = 0.0;
  for (const auto& s : report.summary) {
    if (s.role != "canary") continue;
    if (std::find(dups.begin(), dups.end(), s.dup) == dups.end()) dups.push_back(s.dup);
    tests.insert(s.test);
    lo = std::min(lo, s.median_log10_p);
  }
  std::sort(dups.begin(), dups.end());
  lo = std::floor(lo) - 1.0;
  auto x_of = [&](int dup) {
    const auto it = std::find(dups.begin(), dups.end(), dup);
    const double i = static_cast<double>(it - dups.begin());
    return kPad + (dups.size() > 1 ? i / (dups.size() - 1) : 0.5) * (kW - 2 * kPad);
  };
  auto y_of = [&](double v) { return kPad + (v / lo) * (kH - 2 * kPad); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\""
     << kH << "\">\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\">median log10 p "
        "vs duplication count</text>\n";
  os << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad
     << "\" y2=\"" << kH - kPad << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\""
     << kH - kPad << "\" stroke=\"black\"/>\n";
  for (int dup : dups)
    os << "<text x=\"" << x_of(dup) << "\" y=\"" << kH - kPad + 20
       << "\" text-anchor=\"middle\">" << dup << "</text>\n";
  os << "<text x=\"" << kPad - 8 << "\" y=\"" << y_of(0) + 4
     << "\" text-anchor=\"end\">0</text>\n";
  os << "<text x=\"" << kPad - 8 << "\" y=\"" << y_of(lo) + 4
     << "\" text-anchor=\"end\">" << lo << "</text>\n";
  // log10(0.05) reference line
  os << "<line x1=\"" << kPad << "\" y1=\"" << y_of(std::log10(0.05)) << "\" x2=\""
     << kW - kPad << "\" y2=\"" << y_of(std::log10(0.05))
     << "\" stroke=\"gray\" stroke-dasharray=\"4\"/>\n";
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  int ci = 0;
  for (const auto& test : tests) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[ci % 4] << "\" points=\"";
    for (const auto& s : report.summary)
      if (s.role == "canary" && s.test == test)
        os << x_of(s.dup) << ',' << y_of(s.median_log10_p) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << kW - kPad << "\" y=\"" << kPad + 16 * ci
       << "\" text-anchor=\"end\" fill=\"" << colors[ci % 4] << "\">" << test
       << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

CanaryReport run_canary_experiment(const CanaryExperimentConfig& config) {
  config.validate();
  const std::string config_hash = config.hash();
  CanaryReport report;

  for (const std::uint64_t seed : config.seeds) {
    struct Target {
      std::string name;
      std::string role;
      int dup;
      std::uint64_t dataset_seed;
    };
    std::vector<Target> targets;
    for (std::size_t i = 0; i < config.canaries.size(); ++i) {
      const auto& c = config.canaries[i];
      targets.push_back({c.name, "canary", c.dup,
                         c.path ? 0 : derive_key(seed, {kCanaryTag, i})});
    }
    if (config.control_examples)
      targets.push_back({"control", "control", 0, derive_key(seed, {kControlTag})});

    std::vector<ExperimentRow> rows;
    for (std::size_t d = 0; d < targets.size(); ++d) {
      for (std::size_t t = 0; t < config.tests.size(); ++t) {
        const auto& test = config.tests[t];
        ExperimentRow r;
        r.experiment = config.name;
        r.seed = seed;
        r.dataset = targets[d].name;
        r.role = targets[d].role;
        r.dup = targets[d].dup;
        r.dataset_seed = targets[d].dataset_seed;
        r.test = to_string(test.kind);
        r.shards = test.kind == TestKind::kSharded ? test.num_shards : 0;
        r.permutations = test.num_permutations;
        r.test_seed = derive_key(seed, {kTestTag, d, t});
        r.config_hash = config_hash;
        rows.push_back(std::move(r));
      }
    }

    auto fail_all = [&](const std::string& why) {
      for (auto& r : rows) {
        r.status = "error";
        r.error = why;
      }
    };

    try {
      std::vector<ExampleDataset> datasets;
      for (std::size_t i = 0; i < config.canaries.size(); ++i) {
        const auto& c = config.canaries[i];
        datasets.push_back(c.path ? load_dataset(*c.path)
                                  : synthetic::dataset(c.name, targets[i].dataset_seed,
                                                       c.examples));
      }
      if (config.control_examples)
        datasets.push_back(synthetic::dataset("control", targets.back().dataset_seed,
                                              *config.control_examples));

      CorpusSource bg = config.background;
      if (bg.kind == CorpusSource::Kind::kSynthetic)
        bg.seed = derive_key(bg.seed, {kBackgroundTag, seed});
      CanaryPlan plan;
      plan.background = load_corpus(bg);
      plan.injection_seed = derive_key(seed, {kInjectTag});
      for (std::size_t i = 0; i < config.canaries.size(); ++i)
        if (config.canaries[i].dup > 0)
          plan.canaries.push_back({datasets[i], config.canaries[i].dup});

      auto model = std::make_shared<const NGramModel>(NGramModel::train(
          build_contaminated_corpus(plan), config.order, config.alpha));
      const std::string mhash = model_hash(*model);
      NGramOracle oracle(model, "ngram:" + mhash);

      const std::size_t n_tests = config.tests.size();
      parallel_for(rows.size(), config.jobs, [&](std::size_t k) {
        auto& r = rows[k];
        r.model_hash = mhash;
        TestConfig test = config.tests[k % n_tests];
        test.master_seed = r.test_seed;
        try {
          const auto res = run_test(datasets[k / n_tests], oracle, test, 1);
          r.p_value = res.p_value;
          r.log10_p = log10_p(res.p_value);
          r.t_statistic = res.t_statistic;
        } catch (const Error& e) {
          r.status = "error";
          r.error = e.what();
        }
      });
    } catch (const Error& e) {
      fail_all(e.what());
    }
    for (auto& r : rows) {
      if (r.status != "ok") ++report.failed_rows;
      report.rows.push_back(std::move(r));
    }
  }
  report.summary = summarize_rows(report.rows);

  if (!config.output_dir.empty()) {
    write_text_file(config.output_dir / "results.csv", rows_to_csv(report.rows));
    write_json_file(config.output_dir / "summary.json", summary_to_json(report, config));
    write_text_file(config.output_dir / "plot.svg", summary_svg(report));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Null calibration

void CalibrationConfig::validate() const {
  if (runs < 100) throw ConfigError("null calibration needs runs >= 100");
  if (dataset_size < 2) throw ConfigError("dataset_size must be >= 2");
  test.validate();
  if (test.kind == TestKind::kSharded) make_shard_plan(dataset_size, test.num_shards);
}

CalibrationReport run_null_calibration(const CalibrationConfig& config) {
  config.validate();
  auto model = std::make_shared<const NGramModel>(
      NGramModel::train(load_corpus(config.background), config.order, config.alpha));
  return run_null_calibration(config, std::move(model));
}

CalibrationReport run_null_calibration(const CalibrationConfig& config,
                                       std::shared_ptr<const NGramModel> model) {
  config.validate();
  CalibrationReport report;
  report.model_hash = model_hash(*model);
  NGramOracle oracle(model, "ngram:" + report.model_hash);

  report.p_values.assign(config.runs, 1.0);
  parallel_for(config.runs, config.jobs, [&](std::size_t i) {
    const auto data = synthetic::dataset(
        "null-" + std::to_string(i),
        derive_key(config.seed, {kCalibrationDataTag, i}), config.dataset_size);
    TestConfig test = config.test;
    test.master_seed = derive_key(config.seed, {kCalibrationTestTag, i});
    report.p_values[i] = run_test(data, oracle, test, 1).p_value;
  });
  report.ks_statistic = ks_statistic(report.p_values);
  report.ks_critical_value = ks_critical_value_05(report.p_values.size());
  for (double a : {0.01, 0.05, 0.1}) {
    const auto below = std::count_if(report.p_values.begin(), report.p_values.end(),
                                     [a](double p) { return p < a; });
    report.fraction_below[a] =
        static_cast<double>(below) / static_cast<double>(report.p_values.size());
  }
  return report;
}

json to_json(const CalibrationReport& report, const CalibrationConfig& config) {
  json fractions = json::object();
  for (const auto& [a, f] : report.fraction_below) {
    char key[16];
    std::snprintf(key, sizeof key, "%g", a);
    fractions[key] = f;
  }
  json pvals = json::array();
  for (double p : report.p_values) pvals.push_back(json_double(p));
  return {{"schema", "contam.calibration_report"},
          {"schema_version", kResultSchemaVersion},
          {"tool_version", kToolVersion},
          {"config",
           {{"background", config.background.to_string()},
            {"order", config.order},
            {"alpha", config.alpha},
            {"runs", config.runs},
            {"dataset_size", config.dataset_size},
            {"test", test_config_json(config.test)},
            {"seed", config.seed}}},
          {"model_hash", report.model_hash},
          {"ks_statistic", report.ks_statistic},
          {"ks_critical_value_0.05", report.ks_critical_value},
          {"fraction_below", fractions},
          {"p_values", pvals}};
}

// ---------------------------------------------------------------------------
// Sensitivity sweeps

void SweepConfig::validate() const {
  if (values.empty()) throw ConfigError("sweep needs at least one axis value");
  if (datasets.empty()) throw ConfigError("sweep needs at least one dataset");
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  for (std::size_t v : values) {
    if (axis == SweepAxis::kPermutations && v < 1)
      throw ConfigError("permutation counts must be >= 1");
    if (axis == SweepAxis::kShards && v < 2)
      throw ConfigError("shard counts must be >= 2");
  }
  if (fixed < (axis == SweepAxis::kShards ? 1u : 2u))
    throw ConfigError("bad fixed parameter for sweep");
}

SweepReport sensitivity_sweep(const SweepConfig& config, LogProbOracle& oracle) {
  config.validate();
  SweepReport report;
  report.axis = config.axis;
  for (std::size_t v : config.values)
    for (std::size_t d = 0; d < config.datasets.size(); ++d)
      for (std::uint64_t seed : config.seeds) {
        SweepRow row;
        row.value = v;
        row.dataset = config.datasets[d].name();
        row.seed = seed;
        row.test_seed = derive_key(seed, {kSweepTag, d});
        const std::size_t shards = config.axis == SweepAxis::kShards ? v : config.fixed;
        if (config.datasets[d].size() < 2 * shards) {
          row.skipped = true;
          row.reason = "n=" + std::to_string(config.datasets[d].size()) +
                       " < 2r=" + std::to_string(2 * shards);
        }
        report.rows.push_back(std::move(row));
      }

  const std::size_t per_value = config.datasets.size() * config.seeds.size();
  parallel_for(report.rows.size(), config.jobs, [&](std::size_t k) {
    auto& row = report.rows[k];
    if (row.skipped) return;
    const auto& data = config.datasets[(k % per_value) / config.seeds.size()];
    TestConfig test;
    test.kind = TestKind::kSharded;
    test.num_shards = config.axis == SweepAxis::kShards ? row.value : config.fixed;
    test.num_permutations =
        config.axis == SweepAxis::kPermutations ? row.value : config.fixed;
    test.master_seed = row.test_seed;
    row.p_value = sharded_test(data, oracle, test, 1).p_value;
    row.log10_p = log10_p(row.p_value);
  });

  double best = 0.0;
  for (std::size_t v : config.values) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : report.rows)
      if (row.value == v && !row.skipped) {
        sum += row.log10_p;
        ++n;
      }
    if (n == 0) continue;
    const double mean = sum / static_cast<double>(n);
    report.mean_log10_p.emplace_back(v, mean);
    if (!report.argmin || mean < best) {
      best = mean;
      report.argmin = v;
    }
  }
  return report;
}

std::string sweep_rows_csv(const SweepReport& report) {
  std::ostringstream os;
  os << (report.axis == SweepAxis::kShards ? "shards" : "permutations")
     << ",dataset,seed,test_seed,status,reason,p_value,log10_p\n";
  for (const auto& r : report.rows)
    os << r.value << ',' << csv_field(r.dataset) << ',' << r.seed << ','
       << r.test_seed << ',' << (r.skipped ? "skipped" : "ok") << ','
       << csv_field(r.reason) << ',' << fmt_double(r.p_value) << ','
       << fmt_double(r.log10_p) << '\n';
  return os.str();
}

json to_json(const SweepReport& report) {
  json means = json::array();
  for (const auto& [v, m] : report.mean_log10_p)
    means.push_back({{"value", v}, {"mean_log10_p", json_double(m)}});
  json j = {{"schema", "contam.sweep_report"},
            {"schema_version", kResultSchemaVersion},
            {"tool_version", kToolVersion},
            {"axis", report.axis == SweepAxis::kShards ? "shards" : "permutations"},
            {"mean_log10_p", means},
            {"skipped_rows",
             std::count_if(report.rows.begin(), report.rows.end(),
                           [](const SweepRow& r) { return r.skipped; })}};
  j["argmin"] = report.argmin ? json(*report.argmin) : json();
  return j;
}

}  // namespace contam
