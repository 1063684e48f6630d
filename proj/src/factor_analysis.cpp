#include "unwash/factor_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "unwash/errors.hpp"
#include "unwash/prob.hpp"

namespace unwash {

namespace {

double median(Vec v) {
  std::sort(v.data(), v.data() + v.size());
  const Eigen::Index n = v.size();
  return (n % 2 == 1) ? v(n / 2) : 0.5 * (v(n / 2 - 1) + v(n / 2));
}

void apply_variance_floor(Vec& sigma2, bool* floored) {
  const double floor = 1e-12 * median(sigma2);
  for (Eigen::Index j = 0; j < sigma2.size(); ++j) {
    if (sigma2(j) < floor || sigma2(j) <= 0.0) {
      sigma2(j) = std::max(floor, 1e-300);
      *floored = true;
    }
  }
}

// Log-likelihood of the t-error control-gene regression.
double control_loglik(const Vec& bhat, const Mat& alpha, const Vec& s2, const Vec& nu,
                      const Vec& z, double xi) {
  const Vec resid = bhat - alpha.transpose() * z;
  double ll = 0.0;
  for (Eigen::Index j = 0; j < bhat.size(); ++j) {
    ll += t_logpdf(resid(j), 0.0, xi * s2(j), nu(j));
  }
  return ll;
}

}  // namespace

FactorEstimate truncated_pca(const Mat& Y3, int q) {
  const int r = static_cast<int>(Y3.rows());
  const int p = static_cast<int>(Y3.cols());
  if (!Y3.allFinite()) throw NonFiniteInput("Y3 contains non-finite entries");
  if (q < 0 || (q > 0 && q > std::min(r, p) - 1)) {
    throw QTooLarge("q = " + std::to_string(q) + " exceeds min(rows, cols) - 1 = " +
                    std::to_string(std::min(r, p) - 1));
  }
  FactorEstimate fe;
  fe.q = q;
  fe.df = r - q;
  if (q == 0) {
    fe.alpha.resize(0, p);
    fe.sigma2 = Y3.colwise().squaredNorm().transpose() / static_cast<double>(r);
    apply_variance_floor(fe.sigma2, &fe.variance_floored);
    return fe;
  }
  // SVD on whichever orientation is smaller.
  Mat U;  // r x q left singular vectors of Y3
  if (r <= p) {
    Eigen::BDCSVD<Mat> svd(Y3, Eigen::ComputeThinU);
    U = svd.matrixU().leftCols(q);
  } else {
    Eigen::BDCSVD<Mat> svd(Y3.transpose(), Eigen::ComputeThinV);
    U = svd.matrixV().leftCols(q);
  }
  const double sr = std::sqrt(static_cast<double>(r));
  fe.alpha = (U.transpose() * Y3) / sr;  // q x p; Z3 alpha = U U' Y3
  const Mat resid = Y3 - U * (sr * fe.alpha);
  fe.sigma2 = resid.colwise().squaredNorm().transpose() / static_cast<double>(r - q);
  apply_variance_floor(fe.sigma2, &fe.variance_floored);
  return fe;
}

Vec moderate_variances(const Vec& sigma2, int df) {
  if (df < 1) throw DimensionMismatch("moderate_variances: df must be >= 1");
  if ((sigma2.array() <= 0.0).any()) {
    throw NonPositiveVariance("moderate_variances: variances must be positive");
  }
  const Eigen::Index p = sigma2.size();
  if (p < 2) return sigma2;
  const double vmax = sigma2.maxCoeff(), vmin = sigma2.minCoeff();
  if (vmax - vmin <= 1e-15 * vmax) return sigma2;  // no between-gene variation
  const Vec logs = sigma2.array().log();
  const double mean_z = logs.mean();
  const double var_z = (logs.array() - mean_z).square().sum() / static_cast<double>(p - 1);
  const double half_df = 0.5 * df;
  const double excess = var_z - trigamma(half_df);
  double d0, s0_log;
  if (excess > 0.0) {
    d0 = 2.0 * trigamma_inverse(excess);
    if (!std::isfinite(d0) || d0 <= 0.0) return sigma2;
    s0_log = mean_z - digamma(half_df) + std::log(half_df) + digamma(0.5 * d0) -
             std::log(0.5 * d0);
  } else {
    // Spread fully explained by sampling noise: shrink everything to s0^2.
    d0 = kInf;
    s0_log = mean_z - digamma(half_df) + std::log(half_df);
  }
  const double s02 = std::exp(s0_log);
  if (std::isinf(d0)) return Vec::Constant(p, s02);
  return (d0 * s02 + df * sigma2.array()) / (d0 + df);
}

ControlGeneFit control_gene_tem(const Vec& bhat_C, const Mat& alpha_C, const Vec& s2_C,
                                const Vec& nu, const Vec& init_z, double init_xi) {
  const Eigen::Index m = bhat_C.size();
  const Eigen::Index q = alpha_C.rows();
  if (alpha_C.cols() != m || s2_C.size() != m || nu.size() != m || init_z.size() != q) {
    throw DimensionMismatch("control_gene_tem: inconsistent dimensions");
  }
  if (m < q + 1) {
    throw DimensionMismatch("control_gene_tem: need at least q + 1 control genes");
  }
  if ((s2_C.array() <= 0.0).any()) throw NonPositiveVariance("control_gene_tem: s2 <= 0");
  if ((nu.array() <= 0.0).any()) throw DimensionMismatch("control_gene_tem: nu <= 0");
  if (!(init_xi > 0.0)) throw NonPositiveVariance("control_gene_tem: init_xi <= 0");

  constexpr double kXiFloor = 1e-12;
  constexpr int kMaxIter = 1000;
  constexpr double kRelTol = 1e-8;

  ControlGeneFit fit;
  fit.z = init_z;
  fit.xi = init_xi;
  double ll = control_loglik(bhat_C, alpha_C, s2_C, nu, fit.z, fit.xi);
  fit.loglik_trace.push_back(ll);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    // E-step: latent precision weights.
    Vec resid = bhat_C - alpha_C.transpose() * fit.z;
    Vec w(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      w(j) = (nu(j) + 1.0) / (resid(j) * resid(j) / (fit.xi * s2_C(j)) + nu(j));
    }
    // M-step: weighted GLS for z, then xi from the new residuals.
    Mat gram(q, q);
    Vec rhs(q);
    gram.setZero();
    rhs.setZero();
    for (Eigen::Index j = 0; j < m; ++j) {
      const double wgt = w(j) / s2_C(j);
      gram.noalias() += wgt * alpha_C.col(j) * alpha_C.col(j).transpose();
      rhs.noalias() += wgt * bhat_C(j) * alpha_C.col(j);
    }
    Eigen::LDLT<Mat> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw SingularWeightedGram("control_gene_tem: weighted Gram matrix is singular");
    }
    fit.z = ldlt.solve(rhs);
    resid = bhat_C - alpha_C.transpose() * fit.z;
    double xi_new = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      xi_new += w(j) * resid(j) * resid(j) / s2_C(j);
    }
    xi_new /= static_cast<double>(m);
    if (xi_new < kXiFloor) {
      xi_new = kXiFloor;
      fit.xi_floored = true;
    }
    fit.xi = xi_new;
    const double ll_new = control_loglik(bhat_C, alpha_C, s2_C, nu, fit.z, fit.xi);
    fit.loglik_trace.push_back(ll_new);
    if (std::fabs(ll_new - ll) <= kRelTol * (std::fabs(ll) + 1.0)) {
      fit.converged = true;
      ll = ll_new;
      break;
    }
    ll = ll_new;
  }
  return fit;
}

}  // namespace unwash
