#pragma once

// Dataset validation and the contrast transformation that reduces "one
// linear combination of coefficient rows" to "one covariate of interest".
// After validation the covariate of interest is always the last column of X.

#include "unwash/types.hpp"

namespace unwash {

struct ExpressionDataset {
  Mat Y;  // n x p responses
  Mat X;  // n x k design, covariate of interest in the last column
  int n = 0, p = 0, k = 0;

  bool valid() const { return n > 0; }
};

// Orthonormal basis of the orthogonal complement of a contrast vector.
struct ContrastSpec {
  Vec c;  // length k
  Mat L;  // k x (k-1), L'L = I, c'L = 0

  static ContrastSpec build(const Vec& c);
};

// interest is 1-based; the interesting covariate is permuted to the last
// column (relative order of the others is preserved).
ExpressionDataset validate_dataset(const Mat& Y, const Mat& X, int interest);

// Replaces the design by (XL, Xc/|c|^2) so the last coefficient row of the
// transformed model equals c' * beta. c refers to the dataset's current
// column order.
ExpressionDataset apply_contrast(const ExpressionDataset& ds, const Vec& c);

// Validation for the contrast path: no permutation, then apply_contrast.
ExpressionDataset validate_dataset(const Mat& Y, const Mat& X, const Vec& contrast);

}  // namespace unwash
