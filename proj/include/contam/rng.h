#pragma once

#include <cstdint>
#include <initializer_list>

namespace contam {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds a lineage of integers into a stream key:
//   key = mix64(... mix64(mix64(master) ^ mix64(tag_0 + 1)) ^ ...)
// Keys for different lineages of the same length collide with probability
// 2^-64. This function and CounterRng are a stable format: golden files pin
// their outputs.
constexpr std::uint64_t derive_key(std::uint64_t master,
                                   std::initializer_list<std::uint64_t> tags) {
  std::uint64_t key = mix64(master);
  for (std::uint64_t tag : tags) key = mix64(key ^ mix64(tag + 1));
  return key;
}

// Counter-based generator: the i-th output is mix64(key + i * golden).
// Two generators with the same key produce the same stream regardless of
// when or on which thread they run.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t next() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  // Unbiased integer in [0, bound). bound must be > 0.
  constexpr std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }
  constexpr std::uint64_t operator()() { return next(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace contam
