#pragma once

// Scalar and small-dimension maximizers used by the solvers:
// Brent's method on a bounded interval and dense BFGS with backtracking.

#include <functional>

#include "unwash/types.hpp"

namespace unwash {

struct BrentResult {
  double x = 0.0;
  double fx = 0.0;
  int evals = 0;
};

// Maximizes f on [lo, hi]. Classic Brent local optimizer (golden section plus
// parabolic steps); returns the best point found.
BrentResult brent_maximize(const std::function<double(double)>& f, double lo, double hi,
                           double tol = 1e-10, int max_iter = 200);

struct BfgsResult {
  Vec x;
  double fx = 0.0;
  bool line_search_failed = false;
  int iters = 0;
};

// Maximizes f with analytic gradient, starting from x0 with initial inverse
// Hessian approximation h0 (symmetric positive definite). Only improving
// steps are accepted, so the final fx is never below f(x0).
BfgsResult bfgs_maximize(const std::function<double(const Vec&, Vec*)>& f_grad, const Vec& x0,
                         const Mat& h0, int max_iter = 50, double grad_tol = 1e-9);

}  // namespace unwash
