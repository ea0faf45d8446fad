#include "contam/corpus.h"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "contam/error.h"
#include "contam/rng.h"

namespace contam {
namespace synthetic {
namespace {

// Stream tags keep sentence, document and lexicon streams disjoint.
constexpr std::uint64_t kLexiconTag = 0x6c6578;
constexpr std::uint64_t kSentenceTag = 0x73656e;
constexpr std::uint64_t kDocumentTag = 0x646f63;

// Share of sentence boundaries inside background documents that are line
// breaks (the rest are spaces). Lower values make the sentence-junction
// contexts of a dataset sequence rarer in clean training text.
constexpr double kLineBreakRate = 0.25;

std::string make_sentence(CounterRng& rng) {
  const auto& words = lexicon();
  const auto n = 4 + rng.uniform_below(4);
  std::string s;
  for (std::uint64_t w = 0; w < n; ++w) {
    if (w) s.push_back(' ');
    s += words[rng.uniform_below(words.size())];
  }
  s.push_back('.');
  return s;
}

}  // namespace

const std::vector<std::string>& lexicon() {
  static const std::vector<std::string> words = [] {
    static constexpr std::string_view kOnsets = "bcdfghjklmnprstvwz";
    static constexpr std::string_view kVowels = "aeiou";
    static constexpr std::string_view kCodas = "nrslt";
    CounterRng rng(derive_key(kLexiconTag, {}));
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    while (out.size() < kLexiconSize) {
      const auto syllables = 1 + rng.uniform_below(3);
      std::string w;
      for (std::uint64_t s = 0; s < syllables; ++s) {
        w.push_back(kOnsets[rng.uniform_below(kOnsets.size())]);
        w.push_back(kVowels[rng.uniform_below(kVowels.size())]);
      }
      if (rng.uniform_below(2)) w.push_back(kCodas[rng.uniform_below(kCodas.size())]);
      if (w.size() >= 2 && seen.insert(w).second) out.push_back(std::move(w));
    }
    return out;
  }();
  return words;
}

std::string sentence(std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(derive_key(seed, {kSentenceTag, index}));
  return make_sentence(rng);
}

std::string document(std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(derive_key(seed, {kDocumentTag, index}));
  const auto n = 4 + rng.uniform_below(5);
  std::string doc;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (i) doc.push_back(rng.uniform01() < kLineBreakRate ? '\n' : ' ');
    doc += make_sentence(rng);
  }
  return doc;
}

std::vector<std::string> documents(std::uint64_t seed, std::size_t count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(document(seed, i));
  return out;
}

ExampleDataset dataset(std::string name, std::uint64_t seed, std::size_t size) {
  std::vector<std::string> texts;
  texts.reserve(size);
  for (std::size_t i = 0; i < size; ++i) texts.push_back(sentence(seed, i));
  return ExampleDataset(std::move(name), std::move(texts),
                        "synthetic:seed=" + std::to_string(seed));
}

}  // namespace synthetic

std::string CorpusSource::to_string() const {
  if (kind == Kind::kFile) return path;
  return "synthetic:seed=" + std::to_string(seed) +
         ",docs=" + std::to_string(docs);
}

CorpusSource parse_corpus_source(const std::string& spec) {
  static constexpr std::string_view kPrefix = "synthetic:";
  CorpusSource src;
  if (spec.rfind(kPrefix, 0) != 0) {
    if (spec.empty()) throw ConfigError("empty corpus specifier");
    src.kind = CorpusSource::Kind::kFile;
    src.path = spec;
    return src;
  }
  bool have_seed = false, have_docs = false;
  std::stringstream ss(spec.substr(kPrefix.size()));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ConfigError("bad corpus specifier '" + spec + "'");
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      const auto v = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      if (key == "seed") {
        src.seed = v;
        have_seed = true;
      } else if (key == "docs") {
        src.docs = static_cast<std::size_t>(v);
        have_docs = true;
      } else {
        throw ConfigError("unknown key '" + key + "' in corpus specifier");
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad number '" + value + "' in corpus specifier");
    }
  }
  if (!have_seed || !have_docs || src.docs == 0)
    throw ConfigError("synthetic corpus needs seed=N,docs=M with M > 0");
  return src;
}

std::vector<std::string> load_corpus(const CorpusSource& source) {
  if (source.kind == CorpusSource::Kind::kSynthetic)
    return synthetic::documents(source.seed, source.docs);

  std::ifstream in(source.path, std::ios::binary);
  if (!in) throw ConfigError(source.path + ": cannot open corpus file");
  std::vector<std::string> docs;
  std::string line, current;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!current.empty()) docs.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (!current.empty()) current.push_back('\n');
    current += line;
  }
  if (!current.empty()) docs.push_back(std::move(current));
  if (docs.empty()) throw ConfigError(source.path + ": corpus file is empty");
  return docs;
}

std::vector<std::string> build_contaminated_corpus(const CanaryPlan& plan) {
  std::vector<std::string> docs = plan.background;
  std::size_t extra = 0;
  for (const auto& c : plan.canaries) {
    if (c.duplication_count < 1)
      throw ConfigError("canary '" + c.dataset.name() +
                        "' needs duplication_count >= 1");
    extra += static_cast<std::size_t>(c.duplication_count);
  }
  docs.reserve(docs.size() + extra);

  CounterRng rng(derive_key(plan.injection_seed, {0x696e6a}));
  for (const auto& c : plan.canaries) {
    const std::string block = seq(c.dataset.examples());
    for (int d = 0; d < c.duplication_count; ++d) {
      const auto pos = rng.uniform_below(docs.size() + 1);
      docs.insert(docs.begin() + static_cast<std::ptrdiff_t>(pos), block);
    }
  }
  return docs;
}

}  // namespace contam
