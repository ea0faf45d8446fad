#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace contam {

// One benchmark example. `text` is non-empty and contains no '\n'.
struct Example {
  std::string text;
  std::size_t index = 0;  // position in canonical order
};

// An ordered, non-empty collection of examples. The order of `examples` is
// the canonical order under test and is never altered after construction.
class ExampleDataset {
 public:
  // Validates and normalizes `texts`; indices are assigned in order.
  // Throws DataError when a text is empty after normalization.
  ExampleDataset(std::string name, std::vector<std::string> texts,
                 std::string source_path = {});

  const std::string& name() const { return name_; }
  const std::string& source_path() const { return source_path_; }
  const std::vector<Example>& examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }
  const Example& operator[](std::size_t i) const { return examples_[i]; }

 private:
  std::string name_;
  std::vector<Example> examples_;
  std::string source_path_;
};

// Collapses every run of CR/LF into one space and trims ASCII whitespace.
std::string normalize_text(std::string_view raw);

bool is_valid_utf8(std::string_view s);

// Reads JSON-lines ({"text": ...} per line; chosen when the extension is
// .jsonl or .json) or plain text (one example per line). Only the first
// `max_examples` lines are read when set. Errors name path and line.
ExampleDataset load_dataset(const std::filesystem::path& path,
                            std::optional<std::size_t> max_examples = {});

// Emits the normalized dataset as JSON-lines. Loading the output reproduces
// the dataset byte for byte.
void write_dataset_jsonl(const ExampleDataset& dataset,
                         const std::filesystem::path& path);

// Joins texts with a single '\n' and no trailing newline.
std::string seq(std::span<const Example> examples);
std::string seq(std::span<const std::string> texts);

// seq() of `examples` reordered so that position j holds examples[order[j]].
std::string seq_permuted(std::span<const Example> examples,
                         std::span<const std::size_t> order);

struct SeedLineage {
  std::uint64_t master_seed = 0;
  std::uint64_t shard_index = 0;
  std::uint64_t permutation_index = 0;
};

struct Permutation {
  std::vector<std::size_t> mapping;
  SeedLineage lineage;
};

// Uniform permutation of {0..k-1} (identity included) by Fisher-Yates over a
// CounterRng keyed on derive_key(master_seed, {shard_index,
// permutation_index}). Pure function of its arguments. Requires k >= 2.
Permutation sample_permutation(std::size_t k, std::uint64_t master_seed,
                               std::uint64_t shard_index,
                               std::uint64_t permutation_index);

struct ShardPlan {
  std::size_t num_examples = 0;
  std::size_t num_shards = 0;
  std::vector<std::pair<std::size_t, std::size_t>> boundaries;  // [start, end)

  std::size_t shard_size(std::size_t i) const {
    return boundaries[i].second - boundaries[i].first;
  }
};

// Contiguous shards; the first n mod r shards get floor(n/r)+1 examples, the
// rest floor(n/r). Throws ConfigError when r < 2 or n < 2r.
ShardPlan make_shard_plan(std::size_t n, std::size_t r);

}  // namespace contam
