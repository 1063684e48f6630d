#pragma once

// BACKWASH: a zero-mean normal prior on the confounder coordinates with
// covariance proportional to (alpha alpha')^{-1}, fit by mean-field
// variational EM. Scale-normal mixture components only.

#include <optional>
#include <vector>

#include "unwash/factor_analysis.hpp"
#include "unwash/mixture_prior.hpp"
#include "unwash/rotation.hpp"
#include "unwash/types.hpp"

namespace unwash {

struct BackwashConfig {
  double lambda0 = 10.0;
  int max_iters = 1000;
  double rel_tol = 1e-8;
  bool estimate_phi = true;
  double fixed_phi = 1.0;
  bool estimate_xi = true;
  double fixed_xi = 1.0;
  std::optional<UnimodalMixture> grid;  // must be scale-normal kind
  int threads = 1;
};

struct BackwashState {
  Vec pi;        // M + 1 mixture weights
  Vec mu_v;      // q
  Mat sigma_v;   // q x q
  Mat gamma;     // p x (M+1) variational component weights
  Mat mu_comp;   // p x (M+1) component means (column 0 is zero)
  Mat var_comp;  // p x (M+1) component variances (column 0 is zero)
  Vec mu_beta;   // p variational posterior means
  double phi = 1.0;
  double xi = 1.0;
};

struct BackwashFit {
  UnimodalMixture g_hat;
  BackwashState state;
  std::vector<double> elbo_trace;
  bool converged = false;
  bool jittered = false;  // covariance update needed a numerical jitter

  Vec bhat, se;  // evaluation context
  Mat A;         // p x q, orthonormal columns
  Vec adjusted;  // bhat - phi A mu_v
};

class BackwashProblem {
 public:
  // alpha is q x p on the same scale as bhat; se are standard errors.
  BackwashProblem(Vec bhat, Vec se, const Mat& alpha, UnimodalMixture grid, PenaltySpec penalty,
                  const BackwashConfig& cfg);

  int p() const { return static_cast<int>(bhat_.size()); }
  int q() const { return static_cast<int>(A_.cols()); }
  int M() const { return grid_.M(); }
  const Mat& A() const { return A_; }
  const UnimodalMixture& grid() const { return grid_; }

  // mu_beta from a no-confounder EB fit, mu_v by weighted regression of the
  // residuals on A, xi = phi = 1, pi from the grid initialization.
  BackwashState init_state() const;

  // One full update sweep in the fixed order: per-gene block, pi, Sigma_v,
  // mu_v, phi, xi.
  void sweep(BackwashState& state, bool* jittered = nullptr) const;

  // Closed-form penalized ELBO, exact including constants, so it lower
  // bounds the penalized log marginal likelihood.
  double elbo(const BackwashState& state) const;

 private:
  void per_gene_update(BackwashState& state) const;

  Vec bhat_, se_, s2_;
  Mat A_;        // p x q
  Mat G_;        // A' S^-1 A, q x q
  Vec As_bhat_;  // A' S^-1 bhat
  UnimodalMixture grid_;
  PenaltySpec penalty_;
  BackwashConfig cfg_;
};

// Weighted least squares (A' S^-1 A)^-1 A' S^-1 (bhat - mu_beta); the mu_v
// initializer, exposed for direct checking.
Vec init_confounder_mean(const Mat& A, const Vec& s2, const Vec& bhat, const Vec& mu_beta);

// Orthonormalizing transform alpha' (alpha alpha')^{-1/2} with eigenvalue
// floor 1e-10 * max.
Mat confounder_basis(const Mat& alpha);

BackwashFit fit_backwash_summary(const Vec& bhat, const Vec& se, const Mat& alpha,
                                 const BackwashConfig& cfg);

BackwashFit fit_backwash(const RotatedModel& rm, const FactorEstimate& fa,
                         const BackwashConfig& cfg);

}  // namespace unwash
