#pragma once

// Deterministic, stream-splittable random numbers (xoshiro256**). Substreams
// derived from (seed, tags...) make per-gene work order-independent: the same
// seed yields the same output regardless of thread count or scheduling.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace unwash {

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent substream addressed by a tag path, e.g. {kTagCounts, i, j}.
  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  std::uint64_t next_u64();
  double uniform();                      // in (0, 1)
  double normal();                       // standard normal via inverse cdf
  double normal(double mean, double sd) { return mean + sd * normal(); }
  long poisson(double lambda);
  long binomial(long n, double p);

  // k distinct indices from {0, ..., n-1}, returned sorted.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_u64() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace unwash
