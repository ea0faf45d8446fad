#include "contam/oracle.h"

#include <gtest/gtest.h>

#include "contam/corpus.h"
#include "contam/error.h"
#include "contam/ngram.h"
#include "contam/rng.h"
#include "test_util.h"

namespace contam {
namespace {

TEST(StridedWindows, ShortSequenceIsOneWindow) {
  const auto w = strided_windows(7, 10);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].begin, 0u);
  EXPECT_EQ(w[0].end, 7u);
  EXPECT_EQ(w[0].score_begin, 0u);
}

TEST(StridedWindows, LayoutForOddContext) {
  // C = 5, s = 2: window j starts at 2j and scores from 2j + 3.
  const auto w = strided_windows(10, 5);
  ASSERT_EQ(w.size(), 4u);
  EXPECT_EQ(w[0].end, 5u);
  EXPECT_EQ(w[1].begin, 2u);
  EXPECT_EQ(w[1].score_begin, 5u);
  EXPECT_EQ(w[1].end, 7u);
  EXPECT_EQ(w[3].begin, 6u);
  EXPECT_EQ(w[3].score_begin, 9u);
  EXPECT_EQ(w[3].end, 10u);
}

TEST(StridedWindows, PartitionProperty) {
  CounterRng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t c = 2 + rng.uniform_below(40);
    const std::size_t len = rng.uniform_below(300);
    std::vector<int> scored(len, 0);
    for (const auto& w : strided_windows(len, c)) {
      EXPECT_LE(w.end - w.begin, c);
      EXPECT_LE(w.begin, w.score_begin);
      for (std::size_t i = w.score_begin; i < w.end; ++i) ++scored[i];
    }
    for (std::size_t i = 0; i < len; ++i) ASSERT_EQ(scored[i], 1) << "L=" << len << " C=" << c;
  }
  EXPECT_THROW(strided_windows(10, 1), ConfigError);
}

TEST(StridedLogLikelihood, PositionIndicatorCountsScoredUnits) {
  for (std::size_t len : {9u, 10u, 11u, 30u}) {
    const double total = strided_log_likelihood(
        [](std::size_t, std::size_t end, std::size_t score_begin) {
          return static_cast<double>(end - score_begin);
        },
        len, 10);
    EXPECT_EQ(total, static_cast<double>(len));
  }
}

TEST(StridedLogLikelihood, MatchesExactNGramWhenContextFits) {
  // With order - 1 <= C - s every scored byte keeps its full n-gram context.
  auto model = std::make_shared<const NGramModel>(
      NGramModel::train(synthetic::documents(5, 400), 5, 0.1));
  NGramOracle exact(model, "exact");
  for (std::size_t c : {8u, 9u, 12u, 64u}) {
    NGramOracle strided(model, "strided", c);
    for (const auto& doc : synthetic::documents(6, 20))
      EXPECT_NEAR(strided.score(doc), exact.score(doc), 1e-9) << "C=" << c;
  }
}

TEST(StridedLogLikelihood, ShortContextChangesScore) {
  auto model = std::make_shared<const NGramModel>(
      NGramModel::train(synthetic::documents(5, 400), 5, 0.1));
  NGramOracle exact(model, "exact");
  NGramOracle strided(model, "strided", 4);
  const auto doc = synthetic::document(6, 0);
  EXPECT_NE(strided.score(doc), exact.score(doc));
}

TEST(OpenOracle, Specifiers) {
  testing::TempDir dir;
  const std::vector<std::string> corpus = {"hello world"};
  NGramModel::train(corpus, 3, 0.1).save(dir / "tiny.bin");
  const auto o = open_oracle("builtin:ngram=" + (dir / "tiny.bin").string());
  EXPECT_EQ(o->name(), "ngram:tiny");
  EXPECT_EQ(o->context_length(), 0u);
  EXPECT_THROW(open_oracle("builtin:ngram="), ConfigError);
  EXPECT_THROW(open_oracle("builtin:ngram=" + (dir / "none.bin").string()),
               ModelFormatError);
  EXPECT_THROW(open_oracle("http://x"), ConfigError);
  EXPECT_THROW(open_oracle("tcp:localhost"), ConfigError);
}

TEST(LogProbOracle, DefaultBatchLoopsInOrder) {
  testing::FunctionOracle o([](std::string_view t) { return -static_cast<double>(t.size()); });
  const std::vector<std::string> texts = {"a", "bbb", "cc"};
  EXPECT_EQ(o.score_batch(texts), (std::vector<double>{-1, -3, -2}));
}

}  // namespace
}  // namespace contam
