#include "unwash/simulation.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "unwash/errors.hpp"
#include "unwash/rng.hpp"

namespace unwash {

namespace {

constexpr std::uint64_t kTagRates = 1;
constexpr std::uint64_t kTagFactors = 2;
constexpr std::uint64_t kTagCounts = 3;
constexpr std::uint64_t kTagGroups = 4;
constexpr std::uint64_t kTagNonNull = 5;
constexpr std::uint64_t kTagEffects = 6;
constexpr std::uint64_t kTagThin = 7;
constexpr std::uint64_t kTagControls = 8;

}  // namespace

void SimulationConfig::validate() const {
  if (n < 2 || n % 2 != 0) throw ConfigError("n must be even and >= 2");
  if (p < 1) throw ConfigError("p must be >= 1");
  if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw ConfigError("pi0 must lie in [0, 1]");
  if (!(effect_sd > 0.0)) throw ConfigError("effect_sd must be positive");
  const int n_null = p - static_cast<int>(std::floor((1.0 - pi0) * p));
  if (m_controls < 0 || m_controls > n_null) {
    throw ConfigError("m_controls must not exceed the number of null genes");
  }
  if (uv_rank < 0 || uv_strength < 0.0) throw ConfigError("bad unwanted-variation spec");
  if (base_counts) {
    if (base_counts->rows() != n || base_counts->cols() != p) {
      throw DimensionMismatch("base_counts must be n x p");
    }
    if ((base_counts->array() < 0.0).any()) throw ConfigError("base counts must be nonnegative");
  }
}

Mat synthetic_base_counts(int n, int p, std::uint64_t seed, int uv_rank, double uv_strength) {
  if (n < 1 || p < 1) throw ConfigError("synthetic_base_counts: n, p must be >= 1");
  Rng rate_rng = Rng::stream(seed, {kTagRates});
  Vec log_rates(p);
  for (int j = 0; j < p; ++j) log_rates(j) = std::log(500.0) + rate_rng.normal();

  Mat log_perturb = Mat::Zero(n, p);
  if (uv_rank > 0 && uv_strength > 0.0) {
    Rng f_rng = Rng::stream(seed, {kTagFactors});
    Mat F(n, uv_rank), G(uv_rank, p);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < uv_rank; ++l) F(i, l) = f_rng.normal();
    for (int l = 0; l < uv_rank; ++l)
      for (int j = 0; j < p; ++j) G(l, j) = f_rng.normal();
    log_perturb = (uv_strength / std::sqrt(static_cast<double>(uv_rank))) * (F * G);
  }

  Mat counts(n, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) {
      Rng cell = Rng::stream(seed, {kTagCounts, static_cast<std::uint64_t>(i),
                                    static_cast<std::uint64_t>(j)});
      const double rate = std::exp(log_rates(j) + log_perturb(i, j));
      counts(i, j) = static_cast<double>(cell.poisson(rate));
    }
  }
  return counts;
}

SimulatedStudy simulate(const SimulationConfig& cfg) {
  cfg.validate();
  SimulatedStudy study;
  study.config = cfg;
  const int n = cfg.n, p = cfg.p;

  const Mat base = cfg.base_counts
                       ? *cfg.base_counts
                       : synthetic_base_counts(n, p, cfg.seed, cfg.uv_rank, cfg.uv_strength);

  // Random half/half group split.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng group_rng = Rng::stream(cfg.seed, {kTagGroups});
  group_rng.shuffle(order);
  study.group = IVec::Zero(n);
  for (int i = 0; i < n / 2; ++i) study.group(order[i]) = 1;

  // Non-null set and effect sizes.
  const int n_signal = static_cast<int>(std::floor((1.0 - cfg.pi0) * p));
  Rng pick_rng = Rng::stream(cfg.seed, {kTagNonNull});
  const auto signal_idx =
      pick_rng.sample_without_replacement(static_cast<std::size_t>(p),
                                          static_cast<std::size_t>(n_signal));
  study.is_null.assign(p, true);
  study.effects = Vec::Zero(p);
  Rng effect_rng = Rng::stream(cfg.seed, {kTagEffects});
  for (std::size_t idx : signal_idx) {
    study.is_null[idx] = false;
    double a = 0.0;
    while (a == 0.0) a = effect_rng.normal(0.0, cfg.effect_sd);
    study.effects(static_cast<Eigen::Index>(idx)) = a;
  }

  // Binomial thinning. Negative effects thin the x = 1 group, positive
  // effects thin the x = 0 group; null genes keep their counts exactly.
  study.W = base;
  for (int j = 0; j < p; ++j) {
    const double a = study.effects(j);
    if (a == 0.0) continue;
    Rng thin = Rng::stream(cfg.seed, {kTagThin, static_cast<std::uint64_t>(j)});
    for (int i = 0; i < n; ++i) {
      const int x = study.group(i);
      const double expo = (a < 0.0) ? a * x : -a * (1 - x);
      if (expo == 0.0) continue;
      const double keep = std::exp2(expo);
      const long z = static_cast<long>(base(i, j));
      study.W(i, j) = static_cast<double>(thin.binomial(z, keep));
    }
  }

  study.Y = (study.W.array() + 1.0).log() / std::log(2.0);

  // Controls drawn from the nulls.
  if (cfg.m_controls > 0) {
    std::vector<int> nulls;
    for (int j = 0; j < p; ++j)
      if (study.is_null[j]) nulls.push_back(j);
    Rng ctrl_rng = Rng::stream(cfg.seed, {kTagControls});
    const auto chosen = ctrl_rng.sample_without_replacement(nulls.size(),
                                                            static_cast<std::size_t>(cfg.m_controls));
    for (std::size_t c : chosen) study.controls.push_back(nulls[c]);
  }
  return study;
}

Mat design_matrix(const SimulatedStudy& study) {
  const int n = static_cast<int>(study.group.size());
  Mat X(n, 2);
  X.col(0).setOnes();
  for (int i = 0; i < n; ++i) X(i, 1) = static_cast<double>(study.group(i));
  return X;
}

}  // namespace unwash
