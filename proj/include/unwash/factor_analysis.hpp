#pragma once

// Truncated-PCA factor analysis of the rotated leftover block, empirical
// Bayes variance moderation, and the control-gene t-error EM estimator.

#include <vector>

#include "unwash/types.hpp"

namespace unwash {

struct FactorEstimate {
  Mat alpha;    // q x p confounder loadings (identified up to its rowspace)
  Vec sigma2;   // p residual variances, strictly positive
  int q = 0;
  int df = 0;   // residual degrees of freedom (rows - q)
  bool variance_floored = false;  // set when a degenerate column hit the floor
};

// Best rank-q factorization of Y3 via SVD; convention Z3 = sqrt(r) U_q,
// alpha = U_q' Y3 / sqrt(r) with r = rows(Y3). q = 0 is the no-confounder
// passthrough (sigma2_j = mean square of column j, df = r).
FactorEstimate truncated_pca(const Mat& Y3, int q);

// Squeezes variances toward a common value: (d0 s0^2 + df s_j^2) / (d0 + df)
// with (d0, s0^2) from moments of log s_j^2 under a scaled-inv-chi^2 prior.
Vec moderate_variances(const Vec& sigma2, int df);

struct ControlGeneFit {
  Vec z;
  double xi = 1.0;
  std::vector<double> loglik_trace;
  bool converged = false;
  bool xi_floored = false;  // xi update hit the 1e-12 floor (zero residuals)
};

// EM for the t-error regression bhat_C ~ t_nu(alpha_C' z, xi s_C^2) over the
// control set C. alpha_C is q x |C|; nu holds per-gene degrees of freedom.
ControlGeneFit control_gene_tem(const Vec& bhat_C, const Mat& alpha_C, const Vec& s2_C,
                                const Vec& nu, const Vec& init_z, double init_xi);

}  // namespace unwash
