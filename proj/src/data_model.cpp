#include "unwash/data_model.hpp"

#include <cmath>
#include <string>

#include "unwash/errors.hpp"

namespace unwash {

namespace {

void check_finite(const Mat& m, const char* name) {
  if (!m.allFinite()) throw NonFiniteInput(std::string(name) + " contains non-finite entries");
}

void check_rank(const Mat& X) {
  Eigen::JacobiSVD<Mat> svd(X);
  const Vec& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) < 1e-10 * sv(0)) {
    throw RankDeficientDesign("design matrix X is rank deficient (tolerance 1e-10 * s_max)");
  }
}

ExpressionDataset make_dataset(Mat Y, Mat X) {
  ExpressionDataset ds;
  ds.n = static_cast<int>(Y.rows());
  ds.p = static_cast<int>(Y.cols());
  ds.k = static_cast<int>(X.cols());
  ds.Y = std::move(Y);
  ds.X = std::move(X);
  return ds;
}

}  // namespace

ContrastSpec ContrastSpec::build(const Vec& c) {
  const int k = static_cast<int>(c.size());
  const double cn = c.norm();
  if (!(cn > 0.0)) throw ZeroContrast("contrast vector must be nonzero");
  ContrastSpec spec;
  spec.c = c;
  spec.L.resize(k, k - 1);
  if (k == 1) return spec;  // empty complement
  // Householder reflector sending c to +-|c| e1; its remaining columns span
  // the orthogonal complement of c.
  Vec v = c;
  v(0) += (c(0) >= 0.0 ? cn : -cn);
  const double vtv = v.squaredNorm();
  for (int j = 1; j < k; ++j) {
    Vec e = Vec::Zero(k);
    e(j) = 1.0;
    spec.L.col(j - 1) = e - (2.0 * v(j) / vtv) * v;
  }
  return spec;
}

ExpressionDataset validate_dataset(const Mat& Y, const Mat& X, int interest) {
  if (Y.rows() != X.rows()) {
    throw DimensionMismatch("Y has " + std::to_string(Y.rows()) + " rows but X has " +
                            std::to_string(X.rows()));
  }
  const int n = static_cast<int>(Y.rows());
  const int k = static_cast<int>(X.cols());
  if (k < 1 || Y.cols() < 1) throw DimensionMismatch("Y and X must be non-empty");
  if (interest < 1 || interest > k) {
    throw DimensionMismatch("interest index " + std::to_string(interest) + " outside 1.." +
                            std::to_string(k));
  }
  if (n - k < 1) {
    throw TooFewSamples("need n >= k + 1 (n = " + std::to_string(n) +
                        ", k = " + std::to_string(k) + ")");
  }
  check_finite(Y, "Y");
  check_finite(X, "X");
  check_rank(X);
  Mat Xp(n, k);
  int col = 0;
  for (int j = 0; j < k; ++j) {
    if (j == interest - 1) continue;
    Xp.col(col++) = X.col(j);
  }
  Xp.col(k - 1) = X.col(interest - 1);
  return make_dataset(Y, std::move(Xp));
}

ExpressionDataset validate_dataset(const Mat& Y, const Mat& X, const Vec& contrast) {
  ExpressionDataset ds = validate_dataset(Y, X, static_cast<int>(X.cols()));
  return apply_contrast(ds, contrast);
}

ExpressionDataset apply_contrast(const ExpressionDataset& ds, const Vec& c) {
  if (c.size() != ds.k) {
    throw DimensionMismatch("contrast length " + std::to_string(c.size()) + " != k = " +
                            std::to_string(ds.k));
  }
  const ContrastSpec spec = ContrastSpec::build(c);
  const int k = ds.k;
  Mat Xt(ds.n, k);
  if (k > 1) Xt.leftCols(k - 1) = ds.X * spec.L;
  Xt.col(k - 1) = ds.X * (c / c.squaredNorm());
  check_rank(Xt);
  ExpressionDataset out;
  out.Y = ds.Y;
  out.X = std::move(Xt);
  out.n = ds.n;
  out.p = ds.p;
  out.k = k;
  return out;
}

}  // namespace unwash
