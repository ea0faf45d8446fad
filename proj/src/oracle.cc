#include "contam/oracle.h"

#include <algorithm>

#include "contam/error.h"

namespace contam {

std::vector<double> LogProbOracle::score_batch(
    std::span<const std::string> texts) {
  std::vector<double> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(score(t));
  return out;
}

std::vector<ScoringWindow> strided_windows(std::size_t num_units,
                                           std::size_t context_length) {
  if (context_length < 2)
    throw ConfigError("strided scoring needs context_length >= 2, got " +
                      std::to_string(context_length));
  std::vector<ScoringWindow> windows;
  if (num_units == 0) return windows;
  const std::size_t c = context_length;
  const std::size_t stride = c / 2;
  windows.push_back({0, std::min(c, num_units), 0});
  for (std::size_t j = 1;; ++j) {
    const std::size_t begin = j * stride;
    const std::size_t score_begin = begin + (c - stride);
    if (score_begin >= num_units) break;
    windows.push_back({begin, std::min(begin + c, num_units), score_begin});
  }
  return windows;
}

double strided_log_likelihood(const WindowScorer& scorer, std::size_t num_units,
                              std::size_t context_length) {
  double total = 0.0;
  for (const auto& w : strided_windows(num_units, context_length))
    total += scorer(w.begin, w.end, w.score_begin);
  return total;
}

}  // namespace contam
