#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace semfield::detail {

/// mt19937_64 with explicit conversions; the standard distributions are
/// implementation-defined, and synthetic corpora must match across
/// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n))); }

  /// Index drawn from an inclusive prefix-sum table.
  std::size_t pick(std::span<const double> cumulative) {
    const double u = uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
  }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<double> prefix_sums(std::span<const double> weights) {
  std::vector<double> out(weights.size());
  double running = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) out[i] = running += weights[i];
  return out;
}

}  // namespace semfield::detail
