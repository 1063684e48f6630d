#pragma once

// Joint maximum marginal likelihood over (g, z, xi): EM sweeps for normal
// mixtures, coordinate ascent with quasi-Newton z updates for t/uniform
// mixtures, and the large-p subsampling shortcut.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "unwash/factor_analysis.hpp"
#include "unwash/mixture_prior.hpp"
#include "unwash/rotation.hpp"
#include "unwash/types.hpp"

namespace unwash {

struct MouthwashConfig {
  MixtureKind kind = MixtureKind::kScaleNormal;
  LikelihoodSpec likelihood;
  int gamma = 0;
  double lambda0 = 10.0;
  double lambda_xi = 0.0;
  bool estimate_xi = true;
  double fixed_xi = 1.0;
  int max_iters = 1000;
  double rel_tol = 1e-8;
  std::optional<int> subsample;  // gene count for the z-estimation pass
  std::uint64_t seed = 0;
  std::optional<UnimodalMixture> grid;  // overrides the default grid
  int n_starts = 1;  // extra seeded restarts with perturbed (z, xi); best kept
  int threads = 1;

  void validate() const;
};

struct MouthwashFit {
  UnimodalMixture g_hat;
  Vec z_hat;
  double xi_hat = 1.0;
  std::vector<double> objective_trace;
  Mat responsibilities;  // p x (M+1), rows sum to 1
  bool converged = false;
  bool line_search_failed = false;

  // Working-scale evaluation context consumed by the posterior module.
  Vec bhat_w, shat_w, offset_w;  // offset = alpha' z
  Vec scale;                     // s^gamma factors back to the raw scale
  Vec betahat_raw, se_raw;
  LikelihoodSpec likelihood;
};

// Current iterate of either solver.
struct MouthwashState {
  Vec pi;
  Vec z;
  double xi = 1.0;
};

// The optimization problem at fixed grid: data, penalty and likelihood.
class MouthwashProblem {
 public:
  MouthwashProblem(Vec bhat, Vec shat, Mat alpha, UnimodalMixture grid, PenaltySpec penalty,
                   LikelihoodSpec lik, bool estimate_xi, int threads);

  int p() const { return static_cast<int>(bhat_.size()); }
  int q() const { return static_cast<int>(alpha_.rows()); }
  int M() const { return grid_.M(); }
  const UnimodalMixture& grid() const { return grid_; }
  const PenaltySpec& penalty() const { return penalty_; }

  MouthwashState init_state() const;  // pi from grid, z by GLS, xi = 1

  // Component likelihood matrix L_jm at the given offset (alpha'z) and xi.
  Mat component_likelihoods(const Vec& offset, double xi) const;
  Mat responsibilities(const MouthwashState& state) const;

  double loglik(const MouthwashState& state) const;
  double penalized_objective(const MouthwashState& state) const;

  // One EM sweep (normal mixture, normal likelihood).
  void em_normal_step(MouthwashState& state) const;
  // One coordinate-ascent sweep (uniform mixtures, normal or t likelihood).
  void coord_ascent_step(MouthwashState& state, bool* line_search_failed = nullptr) const;

  // Gradient of the marginal log-likelihood with respect to z.
  Vec loglik_grad_z(const MouthwashState& state) const;

  Vec offset(const Vec& z) const;

 private:
  double xi_objective_em(const Mat& resp, const Vec& offset, double xi) const;
  double brent_update_xi(const std::function<double(double)>& objective, double xi_cur) const;

  Vec bhat_, shat_, s2_;
  Mat alpha_;
  UnimodalMixture grid_;
  PenaltySpec penalty_;
  LikelihoodSpec lik_;
  bool estimate_xi_;
  int threads_;
};

// Convex mixture-weights subproblem: maximize sum_j log(L_j . pi) +
// sum_m (lambda_m - 1) log pi_m over the simplex by monotone EM iterations.
Vec optimize_weights(const Mat& L, Vec pi, const Vec& lambda, int max_iter = 500,
                     double tol = 1e-12);

// Fits on pre-computed summary statistics (se = standard errors, not
// variances). alpha is q x p on the same scale as bhat.
MouthwashFit fit_mouthwash_summary(const Vec& bhat, const Vec& se, const Mat& alpha,
                                   const MouthwashConfig& cfg);

MouthwashFit fit_mouthwash(const RotatedModel& rm, const FactorEstimate& fa,
                           const MouthwashConfig& cfg);

}  // namespace unwash
