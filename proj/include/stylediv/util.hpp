#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace stylediv {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

// FNV-1a over raw bytes. Used for cache keys, bucket hashing and config
// stamps; the exact function is part of the on-disk cache format.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t state = kFnvOffsetBasis) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= kFnvPrime;
  }
  return state;
}

// Absorbs an 8-byte little-endian integer into an FNV-1a state.
constexpr std::uint64_t fnv1a64_mix(std::uint64_t state, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    state ^= (value >> (8 * i)) & 0xffu;
    state *= kFnvPrime;
  }
  return state;
}

std::string to_hex(std::uint64_t value);

// Deterministic random stream. All draws go through pick_index/unit so the
// produced sequences do not depend on implementation-defined distributions.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform index in [0, n). n must be positive.
  std::size_t pick_index(std::size_t n) {
    return static_cast<std::size_t>(next() % n);
  }

  // Uniform double in [0, 1) with 53 bits of entropy.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Fisher-Yates shuffle driven by pick_index.
  template <class T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[pick_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Runs fn(0..n-1) on a bounded worker pool. Callers own output ordering by
// writing to index-addressed slots; the first exception is rethrown after
// all workers join.
void parallel_for(std::size_t n, unsigned max_workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace stylediv
