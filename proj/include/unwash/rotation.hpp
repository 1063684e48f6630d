#pragma once

// QR rotation splitting the regression into three blocks with independent
// errors: the first k-1 rows absorb nuisance covariates, row k carries the
// coefficient of interest, and the last n-k rows feed the factor analysis.

#include "unwash/data_model.hpp"
#include "unwash/types.hpp"

namespace unwash {

struct RotatedModel {
  double r22 = 0.0;      // > 0 by sign convention; betahat = y2 / r22
  Vec y2;                // rotated row for the covariate of interest (length p)
  Mat Y3;                // (n-k) x p factor-analysis input
  Mat Y1;                // first k-1 rotated rows (unused downstream)
  Mat R11;               // (k-1) x (k-1) upper-left block of R
  Vec r12;               // length k-1
  Vec betahat;           // OLS coefficients for the covariate of interest
  double xtx_inv_diag = 0.0;  // relevant diagonal of (X'X)^-1, equals 1/r22^2
  int n = 0, p = 0, k = 0;
};

RotatedModel rotate(const ExpressionDataset& ds);

// Squared standard errors s_j^2 = sigma2_j / r22^2.
Vec ols_standard_errors(const RotatedModel& rm, const Vec& sigma2);

}  // namespace unwash
