#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace contam {

// Black-box scorer mapping a text to its total log-probability.
//
// Implementations must be deterministic for a given text and safe to call
// concurrently from several threads. Scores are finite totals over the whole
// text; no length normalization is applied anywhere in this library.
class LogProbOracle {
 public:
  virtual ~LogProbOracle() = default;

  virtual std::string name() const = 0;

  // Oracle-defined units (tokens or bytes); 0 means unbounded.
  virtual std::size_t context_length() const = 0;

  // Throws TransportError or SemanticError.
  virtual double score(std::string_view text) = 0;

  // Scores several texts; result[i] belongs to texts[i]. The default issues
  // one score() call per text.
  virtual std::vector<double> score_batch(std::span<const std::string> texts);
};

// Sum of log p(unit_i | units [window_begin, i)) for i in
// [score_begin, window_end).
using WindowScorer = std::function<double(
    std::size_t window_begin, std::size_t window_end, std::size_t score_begin)>;

struct ScoringWindow {
  std::size_t begin = 0;        // first unit visible as context
  std::size_t end = 0;          // one past the last unit in the window
  std::size_t score_begin = 0;  // first unit whose log-prob is counted
};

// Windows used for a sequence of `num_units` units under context length C.
// Stride s = floor(C/2). Window 0 is [0, min(C, L)) and scores everything in
// it; window j >= 1 starts at j*s, ends at min(j*s + C, L) and scores units
// from j*s + (C - s). Every unit is scored exactly once. Requires C >= 2.
std::vector<ScoringWindow> strided_windows(std::size_t num_units,
                                           std::size_t context_length);

// Sum of `scorer` over strided_windows(num_units, context_length).
double strided_log_likelihood(const WindowScorer& scorer, std::size_t num_units,
                              std::size_t context_length);

// Parses an oracle specifier:
//   builtin:ngram=<model-file>
//   cmd:<shell command>
//   tcp:<host>:<port>
// Throws ConfigError on malformed specifiers.
struct RemoteOptions;
std::unique_ptr<LogProbOracle> open_oracle(const std::string& spec);
std::unique_ptr<LogProbOracle> open_oracle(const std::string& spec,
                                           const RemoteOptions& options);

}  // namespace contam
