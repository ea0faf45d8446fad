#include "contam/dataset.h"

#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "contam/error.h"
#include "contam/rng.h"

namespace contam {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

bool has_json_extension(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return ext == ".jsonl" || ext == ".json";
}

}  // namespace

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\n' || raw[i] == '\r') {
      while (i + 1 < raw.size() && (raw[i + 1] == '\n' || raw[i + 1] == '\r'))
        ++i;
      out.push_back(' ');
    } else {
      out.push_back(raw[i]);
    }
  }
  std::size_t b = 0, e = out.size();
  while (b < e && is_space(out[b])) ++b;
  while (e > b && is_space(out[e - 1])) --e;
  return out.substr(b, e - b);
}

bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong encodings, surrogates, out of range.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF))
      return false;
    i += len;
  }
  return true;
}

ExampleDataset::ExampleDataset(std::string name, std::vector<std::string> texts,
                               std::string source_path)
    : name_(std::move(name)), source_path_(std::move(source_path)) {
  if (texts.empty()) throw DataError("dataset '" + name_ + "' has no examples");
  examples_.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    std::string t = normalize_text(texts[i]);
    if (t.empty())
      throw DataError("dataset '" + name_ + "': example " + std::to_string(i) +
                      " is empty");
    examples_.push_back(Example{std::move(t), i});
  }
}

ExampleDataset load_dataset(const std::filesystem::path& path,
                            std::optional<std::size_t> max_examples) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open dataset file");

  const bool jsonl = has_json_extension(path);
  std::vector<std::string> texts;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::size_t> blank_lines;
  while ((!max_examples || texts.size() < *max_examples) &&
         std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!is_valid_utf8(line))
      throw DataError(where(path, line_no) + "invalid UTF-8");
    if (line.find_first_not_of(" \t") == std::string::npos) {
      // Blank lines are only tolerated at the very end of the file.
      blank_lines.push_back(line_no);
      continue;
    }
    if (!blank_lines.empty())
      throw DataError(where(path, blank_lines.front()) + "empty example");

    std::string raw;
    if (jsonl) {
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw DataError(where(path, line_no) + "malformed JSON: " + e.what());
      }
      if (!obj.is_object() || !obj.contains("text") || !obj["text"].is_string())
        throw DataError(where(path, line_no) + "missing string field \"text\"");
      raw = obj["text"].get<std::string>();
    } else {
      raw = line;
    }
    std::string text = normalize_text(raw);
    if (text.empty()) throw DataError(where(path, line_no) + "empty \"text\"");
    texts.push_back(std::move(text));
  }
  if (texts.empty()) throw DataError(path.string() + ": empty dataset file");

  return ExampleDataset(path.stem().string(), std::move(texts), path.string());
}

void write_dataset_jsonl(const ExampleDataset& dataset,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  for (const auto& ex : dataset.examples())
    out << nlohmann::json{{"text", ex.text}}.dump() << '\n';
  if (!out) throw DataError(path.string() + ": write failed");
}

std::string seq(std::span<const Example> examples) {
  std::string out;
  std::size_t total = examples.empty() ? 0 : examples.size() - 1;
  for (const auto& e : examples) total += e.text.size();
  out.reserve(total);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (i) out.push_back('\n');
    out += examples[i].text;
  }
  return out;
}

std::string seq(std::span<const std::string> texts) {
  std::string out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (i) out.push_back('\n');
    out += texts[i];
  }
  return out;
}

std::string seq_permuted(std::span<const Example> examples,
                         std::span<const std::size_t> order) {
  std::string out;
  for (std::size_t j = 0; j < order.size(); ++j) {
    if (j) out.push_back('\n');
    out += examples[order[j]].text;
  }
  return out;
}

Permutation sample_permutation(std::size_t k, std::uint64_t master_seed,
                               std::uint64_t shard_index,
                               std::uint64_t permutation_index) {
  if (k < 2)
    throw ConfigError("sample_permutation: need k >= 2, got " +
                      std::to_string(k));
  Permutation p;
  p.lineage = {master_seed, shard_index, permutation_index};
  p.mapping.resize(k);
  std::iota(p.mapping.begin(), p.mapping.end(), std::size_t{0});
  CounterRng rng(derive_key(master_seed, {shard_index, permutation_index}));
  for (std::size_t i = k - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_below(i + 1));
    std::swap(p.mapping[i], p.mapping[j]);
  }
  return p;
}

ShardPlan make_shard_plan(std::size_t n, std::size_t r) {
  if (r < 2)
    throw ConfigError("num_shards must be >= 2 (the t-test needs at least two "
                      "shards), got " + std::to_string(r));
  if (n < 2 * r)
    throw ConfigError("dataset of " + std::to_string(n) + " examples cannot "
                      "form " + std::to_string(r) + " shards of >= 2 examples; "
                      "lower num_shards to at most " + std::to_string(n / 2));
  ShardPlan plan;
  plan.num_examples = n;
  plan.num_shards = r;
  plan.boundaries.reserve(r);
  const std::size_t base = n / r, extra = n % r;
  std::size_t start = 0;
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t size = base + (i < extra ? 1 : 0);
    plan.boundaries.emplace_back(start, start + size);
    start += size;
  }
  return plan;
}

}  // namespace contam
