#pragma once

// Scalar probability densities, distribution functions and the special
// functions they need. Everything here is pure and thread-safe.

#include <cmath>
#include <limits>

namespace unwash {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double norm_logpdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * M_PI * var) + d * d / var);
}

inline double norm_pdf(double x, double mean, double var) {
  return std::exp(norm_logpdf(x, mean, var));
}

// Standard normal cdf.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

// Phi(hi) - Phi(lo), stable in both tails (no 1-eps cancellation).
inline double norm_cdf_diff(double hi, double lo) {
  return 0.5 * (std::erfc(lo * M_SQRT1_2) - std::erfc(hi * M_SQRT1_2));
}

// Standard normal quantile (Wichura's AS 241, double precision).
double norm_quantile(double p);

// Generalized Student-t density with location/scale^2 parameterization.
double t_logpdf(double x, double loc, double scale2, double nu);
inline double t_pdf(double x, double loc, double scale2, double nu) {
  return std::exp(t_logpdf(x, loc, scale2, nu));
}

// cdf of the standard t distribution; nu above 1e7 falls back to normal.
double t_cdf(double z, double nu);

// T_nu(hi) - T_nu(lo), stable when both arguments sit in the same tail.
double t_cdf_diff(double hi, double lo, double nu);

// Regularized incomplete beta I_x(a, b).
double ibeta(double a, double b, double x);

double digamma(double x);
double trigamma(double x);
double tetragamma(double x);

// Solves trigamma(x) = y for x > 0; returns +inf when y <= 0.
double trigamma_inverse(double y);

}  // namespace unwash
