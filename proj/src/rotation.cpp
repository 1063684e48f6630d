#include "unwash/rotation.hpp"

#include <string>

#include "unwash/errors.hpp"

namespace unwash {

RotatedModel rotate(const ExpressionDataset& ds) {
  const int n = ds.n, p = ds.p, k = ds.k;
  Eigen::HouseholderQR<Mat> qr(ds.X);
  Mat R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  Mat W = qr.householderQ().adjoint() * ds.Y;  // Q'Y, n x p
  // Fix signs so diag(R1) >= 0; flipping a Q column flips the matching rows
  // of R and Q'Y.
  for (int i = 0; i < k; ++i) {
    if (R(i, i) < 0.0) {
      R.row(i) = -R.row(i);
      W.row(i) = -W.row(i);
    }
  }
  RotatedModel rm;
  rm.n = n;
  rm.p = p;
  rm.k = k;
  rm.r22 = R(k - 1, k - 1);
  rm.y2 = W.row(k - 1).transpose();
  rm.Y3 = W.bottomRows(n - k);
  rm.Y1 = W.topRows(k - 1);
  rm.R11 = R.topLeftCorner(k - 1, k - 1);
  rm.r12 = R.topRightCorner(k - 1, 1);
  rm.betahat = rm.y2 / rm.r22;
  rm.xtx_inv_diag = 1.0 / (rm.r22 * rm.r22);
  return rm;
}

Vec ols_standard_errors(const RotatedModel& rm, const Vec& sigma2) {
  if (sigma2.size() != rm.p) {
    throw DimensionMismatch("sigma2 length " + std::to_string(sigma2.size()) + " != p = " +
                            std::to_string(rm.p));
  }
  if ((sigma2.array() <= 0.0).any()) {
    throw NonPositiveVariance("all residual variances must be strictly positive");
  }
  return sigma2 * rm.xtx_inv_diag;
}

}  // namespace unwash
