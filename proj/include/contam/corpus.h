#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "contam/dataset.h"

namespace contam {

// Seeded generator of random sentences over a fixed 1000-word lexicon.
// Sentences are 4-7 lowercase words followed by '.', about 30 bytes.
// Documents are 4-8 sentences joined by '\n' (25%) or ' '. Output is a pure
// function of the seed and the item index, so any slice can be regenerated
// alone.
namespace synthetic {

constexpr std::size_t kLexiconSize = 1000;

const std::vector<std::string>& lexicon();

std::string sentence(std::uint64_t seed, std::uint64_t index);
std::string document(std::uint64_t seed, std::uint64_t index);

std::vector<std::string> documents(std::uint64_t seed, std::size_t count);

// A dataset of `size` i.i.d. sentences, hence exchangeable.
ExampleDataset dataset(std::string name, std::uint64_t seed, std::size_t size);

}  // namespace synthetic

// Corpus source specifier: "synthetic:seed=N,docs=M" or a text file path.
// Text files are split into documents at blank lines.
struct CorpusSource {
  enum class Kind { kSynthetic, kFile } kind = Kind::kSynthetic;
  std::uint64_t seed = 0;
  std::size_t docs = 0;
  std::string path;

  std::string to_string() const;
};

CorpusSource parse_corpus_source(const std::string& spec);
std::vector<std::string> load_corpus(const CorpusSource& source);

struct CanaryInjection {
  ExampleDataset dataset;
  int duplication_count = 1;
};

struct CanaryPlan {
  std::vector<std::string> background;
  std::vector<CanaryInjection> canaries;
  std::uint64_t injection_seed = 0;
};

// Background documents in order, with duplication_count copies of
// seq(canary) (canonical order, one whole document per copy) inserted at
// seeded uniform positions. Throws ConfigError when a duplication count is
// below 1.
std::vector<std::string> build_contaminated_corpus(const CanaryPlan& plan);

}  // namespace contam
