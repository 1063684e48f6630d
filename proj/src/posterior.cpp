#include "unwash/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unwash/parallel.hpp"
#include "unwash/prob.hpp"
#include "unwash/quadrature.hpp"

namespace unwash {

namespace {

constexpr double kTiny = 1e-300;

struct ComponentPosterior {
  double mean = 0.0;
  double var = 0.0;
  double prob_nonpos = 0.0;  // Pr(beta <= 0 | component), point mass included
};

// Moments of N(mu, s2) truncated to [a, b], plus Pr(beta <= 0).
ComponentPosterior truncated_normal(double mu, double s2, double a, double b) {
  ComponentPosterior out;
  const double sd = std::sqrt(s2);
  const double za = (a - mu) / sd, zb = (b - mu) / sd;
  const double mass = norm_cdf_diff(zb, za);
  if (mass < 1e-290) {  // numerically empty: weight is zero anyway
    out.mean = std::clamp(mu, a, b);
    out.var = 0.0;
    out.prob_nonpos = (mu <= 0.0) ? 1.0 : 0.0;
    return out;
  }
  const double pa = norm_pdf(za, 0.0, 1.0), pb = norm_pdf(zb, 0.0, 1.0);
  const double d = (pa - pb) / mass;
  out.mean = mu + sd * d;
  out.var = s2 * (1.0 + (za * pa - zb * pb) / mass - d * d);
  if (out.var < 0.0) out.var = 0.0;
  const double z0 = -mu / sd;
  out.prob_nonpos = std::clamp(norm_cdf_diff(std::min(z0, zb), za) / mass, 0.0, 1.0);
  return out;
}

// Moments of the t likelihood truncated to [a, b], by quadrature.
ComponentPosterior truncated_t(double mu, double s2, double nu, double a, double b) {
  ComponentPosterior out;
  const double sd = std::sqrt(s2);
  auto dens = [&](double beta) { return t_pdf(beta, mu, s2, nu); };
  const double tol = 1e-10 * (1.0 + 1.0 / sd);
  const double mass = integrate(dens, a, b, tol);
  if (mass < 1e-290) {
    out.mean = std::clamp(mu, a, b);
    out.var = 0.0;
    out.prob_nonpos = (mu <= 0.0) ? 1.0 : 0.0;
    return out;
  }
  const double m1 = integrate([&](double beta) { return beta * dens(beta); }, a, b, tol) / mass;
  const double m2 =
      integrate([&](double beta) { return beta * beta * dens(beta); }, a, b, tol) / mass;
  out.mean = m1;
  out.var = std::max(m2 - m1 * m1, 0.0);
  out.prob_nonpos = std::clamp(integrate(dens, a, std::min(0.0, b), tol) / mass, 0.0, 1.0);
  return out;
}

GeneSummaries finalize(GeneSummaries s) {
  s.qvalue_analog = qvalue_from_lfdr(s.lfdr);
  return s;
}

}  // namespace

Vec qvalue_from_lfdr(const Vec& lfdr) {
  const Eigen::Index p = lfdr.size();
  std::vector<Eigen::Index> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return lfdr(a) < lfdr(b); });
  Vec q(p);
  double running = 0.0;
  for (Eigen::Index rank = 0; rank < p; ++rank) {
    running += lfdr(order[rank]);
    q(order[rank]) = running / static_cast<double>(rank + 1);
  }
  return q;
}

GeneSummaries posterior_summaries(const MouthwashFit& fit, int threads) {
  const Eigen::Index p = fit.bhat_w.size();
  const int nm = fit.g_hat.M();
  GeneSummaries s;
  s.betahat = fit.betahat_raw;
  s.sebetahat = fit.se_raw;
  s.adjusted_betahat.resize(p);
  s.lfdr.resize(p);
  s.lfsr.resize(p);
  s.post_mean.resize(p);
  s.post_sd.resize(p);

  parallel_for(0, static_cast<std::size_t>(p), threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t js = lo; js < hi; ++js) {
      const Eigen::Index j = static_cast<Eigen::Index>(js);
      const double r = fit.bhat_w(j) - fit.offset_w(j);
      const double noise = fit.xi_hat * fit.shat_w(j) * fit.shat_w(j);
      double mean = 0.0, second = 0.0, prob_nonpos = 0.0, prob_nonneg = 0.0;
      for (int m = 0; m <= nm; ++m) {
        const double g = fit.responsibilities(j, m);
        const auto& comp = fit.g_hat.comps[m];
        ComponentPosterior cp;
        if (comp.type == MixtureComponent::Type::kPointMass) {
          cp.mean = 0.0;
          cp.var = 0.0;
          prob_nonpos += g;  // the point mass counts on both sides
          prob_nonneg += g;
          continue;
        }
        if (comp.type == MixtureComponent::Type::kNormal) {
          const double tau2 = comp.tau * comp.tau;
          const double v = 1.0 / (1.0 / tau2 + 1.0 / noise);
          cp.mean = r * v / noise;
          cp.var = v;
          cp.prob_nonpos = norm_cdf(-cp.mean / std::sqrt(v));
        } else if (!fit.likelihood.student_t) {
          cp = truncated_normal(r, noise, comp.a, comp.b);
        } else {
          cp = truncated_t(r, noise, fit.likelihood.nu, comp.a, comp.b);
        }
        mean += g * cp.mean;
        second += g * (cp.mean * cp.mean + cp.var);
        prob_nonpos += g * cp.prob_nonpos;
        prob_nonneg += g * (1.0 - cp.prob_nonpos);
      }
      const double scale = fit.scale(j);
      s.adjusted_betahat(j) = scale * r;
      s.lfdr(j) = fit.responsibilities(j, 0);
      s.lfsr(j) = std::min(prob_nonpos, prob_nonneg);
      s.post_mean(j) = scale * mean;
      s.post_sd(j) = scale * std::sqrt(std::max(second - mean * mean, 0.0));
    }
  });
  return finalize(std::move(s));
}

GeneSummaries posterior_summaries(const BackwashFit& fit) {
  const Eigen::Index p = fit.bhat.size();
  const int nm = fit.g_hat.M();
  GeneSummaries s;
  s.betahat = fit.bhat;
  s.sebetahat = fit.se;
  s.adjusted_betahat = fit.adjusted;
  s.lfdr.resize(p);
  s.lfsr.resize(p);
  s.post_mean.resize(p);
  s.post_sd.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double mean = 0.0, second = 0.0, prob_nonpos = 0.0, prob_nonneg = 0.0;
    for (int m = 0; m <= nm; ++m) {
      const double g = fit.state.gamma(j, m);
      if (m == 0) {
        prob_nonpos += g;
        prob_nonneg += g;
        continue;
      }
      const double mu = fit.state.mu_comp(j, m);
      const double var = fit.state.var_comp(j, m);
      const double pn = var > 0.0 ? norm_cdf(-mu / std::sqrt(var)) : (mu <= 0.0 ? 1.0 : 0.0);
      mean += g * mu;
      second += g * (mu * mu + var);
      prob_nonpos += g * pn;
      prob_nonneg += g * (1.0 - pn);
    }
    s.lfdr(j) = fit.state.gamma(j, 0);
    s.lfsr(j) = std::min(prob_nonpos, prob_nonneg);
    s.post_mean(j) = mean;
    s.post_sd(j) = std::sqrt(std::max(second - mean * mean, 0.0));
  }
  return finalize(std::move(s));
}

double pi0(const MouthwashFit& fit) { return fit.g_hat.pi(0); }
double pi0(const BackwashFit& fit) { return fit.state.pi(0); }

}  // namespace unwash
