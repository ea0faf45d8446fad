#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "contam/oracle.h"

namespace contam {

// Byte-level n-gram language model with additive (Lidstone) smoothing:
//
//   P(b | ctx) = (count(ctx -> b) + alpha) / (total(ctx) + 256 * alpha)
//
// Position i of a document is conditioned on the longest available context,
// min(i, order - 1) preceding bytes of the same document. There is no BOS
// padding, so the first bytes of every document use the lower-order tables.
// Counts never span document boundaries.
class NGramModel {
 public:
  static constexpr int kVocabSize = 256;
  static constexpr int kDefaultMaxOrder = 12;
  static constexpr std::uint32_t kFormatVersion = 1;

  // An untrained model. Throws ConfigError for order < 1, alpha <= 0 or
  // order > max_order.
  NGramModel(int order, double alpha, int max_order = kDefaultMaxOrder);

  // Single pass over the corpus, one document at a time. Throws ConfigError
  // for an empty corpus.
  static NGramModel train(std::span<const std::string> corpus, int order,
                          double alpha, int max_order = kDefaultMaxOrder);

  void add_document(std::string_view document);

  int order() const { return order_; }
  double alpha() const { return alpha_; }

  // `context` is given oldest byte first and must hold at most order-1 bytes.
  std::uint64_t count(std::string_view context, unsigned char next) const;
  std::uint64_t context_total(std::string_view context) const;
  double log_prob(std::string_view context, unsigned char next) const;

  // Exact chain-rule log-likelihood of `text` as one document.
  double logprob(std::string_view text) const;

  // Sum of ln P(text[i] | text[max(begin, i-order+1), i)) for i in
  // [score_begin, end). Contexts never reach before `begin`.
  double window_logprob(std::string_view text, std::size_t begin,
                        std::size_t end, std::size_t score_begin) const;

  // Number of distinct (context, next) pairs across all orders.
  std::size_t num_entries() const;

  // Binary layout (all integers little-endian):
  //   magic "CTNGRAM\0" | u32 version | u32 order | f64 alpha
  //   for each context length o in 0..order-1:
  //     u64 n | n x ( o context bytes | u8 next | u64 count )
  //   u64 FNV-1a of every preceding byte
  // Entries are sorted by (context, next) so equal models give equal files.
  std::string serialize() const;
  static NGramModel deserialize(std::string_view bytes,
                                const std::string& source = "<memory>");

  void save(const std::filesystem::path& path) const;
  static NGramModel load(const std::filesystem::path& path);

 private:
  // Up to 11 context bytes plus the next byte, packed nearest byte first.
  struct Key {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    bool operator==(const Key&) const = default;
    void set_byte(std::size_t pos, unsigned char b);
    unsigned char byte(std::size_t pos) const;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  using Table = std::unordered_map<Key, std::uint64_t, KeyHash>;

  static Key context_key(std::string_view context);
  double position_log_prob(std::string_view text, std::size_t i,
                           std::size_t context_len) const;

  int order_;
  double alpha_;
  std::vector<Table> joint_;     // [context length] -> (ctx, next) counts
  std::vector<Table> contexts_;  // [context length] -> ctx totals
};

// LogProbOracle over a trained model. With context_length 0 the exact chain
// rule is used; otherwise bytes are scored with strided windows of that many
// bytes, contexts truncated at window starts.
class NGramOracle : public LogProbOracle {
 public:
  NGramOracle(std::shared_ptr<const NGramModel> model, std::string name,
              std::size_t context_length = 0);

  std::string name() const override { return name_; }
  std::size_t context_length() const override { return context_length_; }
  double score(std::string_view text) override;

  const NGramModel& model() const { return *model_; }

 private:
  std::shared_ptr<const NGramModel> model_;
  std::string name_;
  std::size_t context_length_;
};

}  // namespace contam
