#include "unwash/prob.hpp"

#include <cmath>
#include <stdexcept>

namespace unwash {

double norm_quantile(double p) {
  // AS 241 algorithm PPND16.
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

double t_logpdf(double x, double loc, double scale2, double nu) {
  if (!(nu > 0.0) || !(scale2 > 0.0)) throw std::invalid_argument("t_logpdf: bad parameters");
  if (std::isinf(nu)) return norm_logpdf(x, loc, scale2);
  const double d2 = (x - loc) * (x - loc) / scale2;
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(M_PI * nu * scale2) -
         0.5 * (nu + 1.0) * std::log1p(d2 / nu);
}

namespace {

// Continued fraction for the incomplete beta function (Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lbeta =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(lbeta);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double t_cdf(double z, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("t_cdf: nu must be positive");
  if (std::isinf(nu) || nu > 1e7) return norm_cdf(z);
  const double tail = 0.5 * ibeta(0.5 * nu, 0.5, nu / (nu + z * z));
  return (z <= 0.0) ? tail : 1.0 - tail;
}

double t_cdf_diff(double hi, double lo, double nu) {
  if (hi < lo) return -t_cdf_diff(lo, hi, nu);
  if (std::isinf(nu) || nu > 1e7) return norm_cdf_diff(hi, lo);
  auto lower_tail = [&](double z) { return 0.5 * ibeta(0.5 * nu, 0.5, nu / (nu + z * z)); };
  if (lo >= 0.0) return lower_tail(-lo) - lower_tail(-hi);  // both in the upper tail
  if (hi <= 0.0) return lower_tail(hi) - lower_tail(lo);
  return 1.0 - lower_tail(-hi) - lower_tail(lo);
}

double digamma(double x) {
  double result = 0.0;
  while (x < 15.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double r = 1.0 / x, r2 = r * r;
  result += std::log(x) - 0.5 * r -
            r2 * (1.0 / 12.0 - r2 * (1.0 / 120.0 - r2 * (1.0 / 252.0 - r2 / 240.0)));
  return result;
}

double trigamma(double x) {
  double result = 0.0;
  while (x < 15.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double r = 1.0 / x, r2 = r * r;
  result += r * (1.0 + 0.5 * r +
                 r2 * (1.0 / 6.0 - r2 * (1.0 / 30.0 - r2 * (1.0 / 42.0 - r2 / 30.0))));
  return result;
}

double tetragamma(double x) {
  double result = 0.0;
  while (x < 15.0) {
    result -= 2.0 / (x * x * x);
    x += 1.0;
  }
  const double r = 1.0 / x, r2 = r * r;
  result += -r2 * (1.0 + r + r2 * (0.5 - r2 * (1.0 / 6.0 - r2 / 6.0)));
  return result;
}

double trigamma_inverse(double y) {
  if (!(y > 0.0)) return kInf;
  if (y > 1e7) return 1.0 / std::sqrt(y);
  if (y < 1e-6) return 1.0 / y;
  double x = 0.5 + 1.0 / y;
  for (int iter = 0; iter < 60; ++iter) {
    const double tri = trigamma(x);
    const double dif = tri * (1.0 - tri / y) / tetragamma(x);
    x += dif;
    if (std::fabs(dif) < 1e-10 * x) break;
  }
  return x;
}

}  // namespace unwash
