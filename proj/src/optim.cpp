#include "unwash/optim.hpp"

#include <cmath>

namespace unwash {

BrentResult brent_maximize(const std::function<double(double)>& f, double lo, double hi,
                           double tol, int max_iter) {
  const double golden = 0.3819660112501051;
  double a = lo, b = hi;
  double x = a + golden * (b - a);
  double w = x, v = x;
  int evals = 0;
  auto eval = [&](double t) {
    ++evals;
    return f(t);
  };
  double fx = eval(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    const double m = 0.5 * (a + b);
    const double tol1 = tol * std::fabs(x) + 1e-12;
    const double tol2 = 2.0 * tol1;
    if (std::fabs(x - m) <= tol2 - 0.5 * (b - a)) break;
    double p = 0.0, q = 0.0, r = 0.0;
    bool parabolic = false;
    if (std::fabs(e) > tol1) {
      r = (x - w) * (fx - fv);
      q = (x - v) * (fx - fw);
      p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::fabs(q);
      const double e_old = e;
      e = d;
      if (std::fabs(p) < std::fabs(0.5 * q * e_old) && p > q * (a - x) && p < q * (b - x)) {
        parabolic = true;
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
      }
    }
    if (!parabolic) {
      e = (x < m) ? (b - x) : (a - x);
      d = golden * e;
    }
    const double u = (std::fabs(d) >= tol1) ? x + d : x + ((d > 0.0) ? tol1 : -tol1);
    const double fu = eval(u);
    if (fu >= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu >= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu >= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, fx, evals};
}

BfgsResult bfgs_maximize(const std::function<double(const Vec&, Vec*)>& f_grad, const Vec& x0,
                         const Mat& h0, int max_iter, double grad_tol) {
  const int n = static_cast<int>(x0.size());
  BfgsResult out;
  out.x = x0;
  if (n == 0) {
    out.fx = f_grad(x0, nullptr);
    return out;
  }
  Mat h = h0;
  Vec g(n);
  double fx = f_grad(out.x, &g);
  out.fx = fx;
  for (int iter = 0; iter < max_iter; ++iter) {
    out.iters = iter;
    if (g.lpNorm<Eigen::Infinity>() <= grad_tol * (1.0 + std::fabs(fx))) break;
    Vec dir = h * g;
    double slope = g.dot(dir);
    if (!(slope > 0.0)) {  // H lost positive definiteness; reset
      h = h0;
      dir = h * g;
      slope = g.dot(dir);
      if (!(slope > 0.0)) break;
    }
    double step = 1.0;
    Vec x_new;
    double f_new = fx;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = out.x + step * dir;
      f_new = f_grad(x_new, nullptr);
      if (std::isfinite(f_new) && f_new >= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.line_search_failed = true;
      break;
    }
    Vec g_new(n);
    f_grad(x_new, &g_new);
    const Vec s = x_new - out.x;
    const Vec y = g - g_new;  // gradient-of-(-f) differences keep s'y > 0 near a max
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Vec hy = h * y;
      const double yhy = y.dot(hy);
      h += ((sy + yhy) / (sy * sy)) * (s * s.transpose());
      const Mat hys = hy * s.transpose();
      h -= (hys + hys.transpose()) / sy;
    }
    out.x = x_new;
    fx = f_new;
    out.fx = f_new;
    g = g_new;
  }
  return out;
}

}  // namespace unwash
