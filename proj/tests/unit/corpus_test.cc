#include "contam/corpus.h"

#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "contam/error.h"
#include "test_util.h"

namespace contam {
namespace {

TEST(Synthetic, LexiconIsFixedAndUnique) {
  const auto& words = synthetic::lexicon();
  ASSERT_EQ(words.size(), synthetic::kLexiconSize);
  EXPECT_EQ(std::set<std::string>(words.begin(), words.end()).size(), words.size());
  for (const auto& w : words) {
    EXPECT_GE(w.size(), 2u);
    EXPECT_TRUE(std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; }));
  }
}

TEST(Synthetic, SentencesArePureFunctionsOfSeedAndIndex) {
  EXPECT_EQ(synthetic::sentence(3, 17), synthetic::sentence(3, 17));
  EXPECT_NE(synthetic::sentence(3, 17), synthetic::sentence(3, 18));
  EXPECT_NE(synthetic::sentence(3, 17), synthetic::sentence(4, 17));
  const auto s = synthetic::sentence(1, 1);
  EXPECT_EQ(s.back(), '.');
  const auto words = std::count(s.begin(), s.end(), ' ') + 1;
  EXPECT_GE(words, 4);
  EXPECT_LE(words, 7);
}

TEST(Synthetic, DocumentsAndDatasets) {
  const auto docs = synthetic::documents(9, 50);
  ASSERT_EQ(docs.size(), 50u);
  EXPECT_EQ(docs[10], synthetic::document(9, 10));
  std::size_t bytes = 0;
  for (const auto& d : docs) bytes += d.size();
  EXPECT_GT(bytes / docs.size(), 100u);
  EXPECT_LT(bytes / docs.size(), 300u);
  const auto ds = synthetic::dataset("x", 5, 200);
  EXPECT_EQ(ds.size(), 200u);
  EXPECT_EQ(ds.name(), "x");
  EXPECT_EQ(ds[3].text, synthetic::sentence(5, 3));
}

TEST(CorpusSource, Parsing) {
  const auto s = parse_corpus_source("synthetic:seed=7,docs=50000");
  EXPECT_EQ(s.kind, CorpusSource::Kind::kSynthetic);
  EXPECT_EQ(s.seed, 7u);
  EXPECT_EQ(s.docs, 50000u);
  EXPECT_EQ(s.to_string(), "synthetic:seed=7,docs=50000");
  EXPECT_EQ(parse_corpus_source("data/wiki.txt").path, "data/wiki.txt");
  EXPECT_THROW(parse_corpus_source("synthetic:seed=1"), ConfigError);
  EXPECT_THROW(parse_corpus_source("synthetic:seed=x,docs=2"), ConfigError);
  EXPECT_THROW(parse_corpus_source("synthetic:seed=1,docs=2,size=3"), ConfigError);
  EXPECT_THROW(parse_corpus_source(""), ConfigError);
}

TEST(CorpusSource, FilesSplitAtBlankLines) {
  testing::TempDir dir;
  testing::write_file(dir / "c.txt", "one\ntwo\n\n\nthree\r\n\nfour");
  CorpusSource src;
  src.kind = CorpusSource::Kind::kFile;
  src.path = (dir / "c.txt").string();
  EXPECT_EQ(load_corpus(src), (std::vector<std::string>{"one\ntwo", "three", "four"}));
  src.path = (dir / "none.txt").string();
  EXPECT_THROW(load_corpus(src), ConfigError);
}

TEST(Contamination, InjectsExactCopies) {
  CanaryPlan plan;
  plan.background = synthetic::documents(1, 100);
  const auto a = synthetic::dataset("a", 2, 10);
  const auto b = synthetic::dataset("b", 3, 10);
  plan.canaries = {{a, 3}, {b, 1}};
  plan.injection_seed = 4;
  const auto corpus = build_contaminated_corpus(plan);
  ASSERT_EQ(corpus.size(), 104u);
  EXPECT_EQ(std::count(corpus.begin(), corpus.end(), seq(a.examples())), 3);
  EXPECT_EQ(std::count(corpus.begin(), corpus.end(), seq(b.examples())), 1);
  // Background order is preserved.
  std::vector<std::string> rest;
  for (const auto& d : corpus)
    if (d != seq(a.examples()) && d != seq(b.examples())) rest.push_back(d);
  EXPECT_EQ(rest, plan.background);
  EXPECT_EQ(build_contaminated_corpus(plan), corpus);
  plan.canaries[1].duplication_count = 0;
  EXPECT_THROW(build_contaminated_corpus(plan), ConfigError);
}

}  // namespace
}  // namespace contam
