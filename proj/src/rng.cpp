#include "unwash/rng.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "unwash/prob.hpp"

namespace unwash {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

Rng Rng::stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t sm = seed;
  std::uint64_t key = splitmix64(sm);
  for (std::uint64_t tag : path) {
    sm = key ^ (tag + 0x9e3779b97f4a7c15ULL);
    key = splitmix64(sm);
  }
  return Rng(key);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  double u;
  do {
    u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  } while (u <= 0.0);
  return u;
}

double Rng::normal() { return norm_quantile(uniform()); }

long Rng::poisson(double lambda) {
  if (lambda <= 0.0) return 0;
  if (lambda < 12.0) {
    const double limit = std::exp(-lambda);
    long k = -1;
    double prod = 1.0;
    do {
      ++k;
      prod *= uniform();
    } while (prod > limit);
    return k;
  }
  // Rejection from a Lorentzian envelope (Numerical Recipes poidev).
  const double sq = std::sqrt(2.0 * lambda);
  const double loglam = std::log(lambda);
  const double g = lambda * loglam - std::lgamma(lambda + 1.0);
  double em, t;
  do {
    double y;
    do {
      y = std::tan(M_PI * uniform());
      em = sq * y + lambda;
    } while (em < 0.0);
    em = std::floor(em);
    t = 0.9 * (1.0 + y * y) * std::exp(em * loglam - std::lgamma(em + 1.0) - g);
  } while (uniform() > t);
  return static_cast<long>(em);
}

long Rng::binomial(long n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  const bool flip = p > 0.5;
  const double pp = flip ? 1.0 - p : p;
  long result;
  if (n < 32) {
    long k = 0;
    for (long i = 0; i < n; ++i)
      if (uniform() < pp) ++k;
    result = k;
  } else if (n * pp < 12.0) {
    // Sequential cdf inversion; cheap when the mean is small.
    const double log_q = std::log1p(-pp);
    long k = 0;
    double r = uniform();
    double prob = std::exp(n * log_q);
    double cdf = prob;
    while (r > cdf && k < n) {
      ++k;
      prob *= (static_cast<double>(n - k + 1) / k) * (pp / (1.0 - pp));
      cdf += prob;
    }
    result = k;
  } else {
    // Rejection (Numerical Recipes bnldev core).
    const double en = static_cast<double>(n);
    const double pc = 1.0 - pp;
    const double plog = std::log(pp), pclog = std::log(pc);
    const double am = en * pp;
    const double oldg = std::lgamma(en + 1.0);
    const double sq = std::sqrt(2.0 * am * pc);
    double em, t;
    do {
      double y;
      do {
        y = std::tan(M_PI * uniform());
        em = sq * y + am;
      } while (em < 0.0 || em >= en + 1.0);
      em = std::floor(em);
      t = 1.2 * sq * (1.0 + y * y) *
          std::exp(oldg - std::lgamma(em + 1.0) - std::lgamma(en - em + 1.0) + em * plog +
                   (en - em) * pclog);
    } while (uniform() > t);
    result = static_cast<long>(em);
  }
  return flip ? n - result : result;
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
  std::vector<std::size_t> out;
  if (k >= n) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
  }
  // Floyd's algorithm.
  std::unordered_set<std::size_t> chosen;
  for (std::size_t j = n - k; j < n; ++j) {
    const std::size_t t = static_cast<std::size_t>(next_u64() % (j + 1));
    if (chosen.count(t))
      chosen.insert(j);
    else
      chosen.insert(t);
  }
  out.assign(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace unwash
