#include "unwash/backwash.hpp"

#include <cmath>
#include <string>

#include "unwash/errors.hpp"
#include "unwash/mouthwash.hpp"
#include "unwash/parallel.hpp"
#include "unwash/posterior.hpp"
#include "unwash/prob.hpp"

namespace unwash {

namespace {

constexpr double kTiny = 1e-300;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

Mat confounder_basis(const Mat& alpha) {
  const int q = static_cast<int>(alpha.rows());
  Eigen::SelfAdjointEigenSolver<Mat> eig(alpha * alpha.transpose());
  if (eig.info() != Eigen::Success) throw SingularGram("eigendecomposition of alpha alpha'");
  Vec vals = eig.eigenvalues();
  const double floor = 1e-10 * vals.maxCoeff();
  for (int i = 0; i < q; ++i) vals(i) = std::max(vals(i), floor);
  const Mat inv_sqrt =
      eig.eigenvectors() * vals.cwiseInverse().cwiseSqrt().asDiagonal() *
      eig.eigenvectors().transpose();
  return alpha.transpose() * inv_sqrt;
}

Vec init_confounder_mean(const Mat& A, const Vec& s2, const Vec& bhat, const Vec& mu_beta) {
  const int q = static_cast<int>(A.cols());
  Mat gram = Mat::Zero(q, q);
  Vec rhs = Vec::Zero(q);
  for (Eigen::Index j = 0; j < bhat.size(); ++j) {
    const double w = 1.0 / s2(j);
    gram.noalias() += w * A.row(j).transpose() * A.row(j);
    rhs.noalias() += w * (bhat(j) - mu_beta(j)) * A.row(j).transpose();
  }
  Eigen::LDLT<Mat> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularGram("backwash init: A' S^-1 A is singular");
  }
  return ldlt.solve(rhs);
}

BackwashProblem::BackwashProblem(Vec bhat, Vec se, const Mat& alpha, UnimodalMixture grid,
                                 PenaltySpec penalty, const BackwashConfig& cfg)
    : bhat_(std::move(bhat)), se_(std::move(se)), grid_(std::move(grid)),
      penalty_(std::move(penalty)), cfg_(cfg) {
  if (grid_.kind != MixtureKind::kScaleNormal) {
    throw ConfigError("backwash requires the scale-normal mixture kind");
  }
  grid_.check();
  if (alpha.rows() < 1) throw ConfigError("backwash requires q >= 1");
  if (se_.size() != bhat_.size() || alpha.cols() != bhat_.size()) {
    throw DimensionMismatch("backwash problem: inconsistent dimensions");
  }
  if ((se_.array() <= 0.0).any()) throw NonPositiveVariance("standard errors must be positive");
  s2_ = se_.array().square();
  A_ = confounder_basis(alpha);
  const int q = static_cast<int>(A_.cols());
  G_ = Mat::Zero(q, q);
  As_bhat_ = Vec::Zero(q);
  for (int j = 0; j < p(); ++j) {
    const double w = 1.0 / s2_(j);
    G_.noalias() += w * A_.row(j).transpose() * A_.row(j);
    As_bhat_.noalias() += w * bhat_(j) * A_.row(j).transpose();
  }
}

void BackwashProblem::per_gene_update(BackwashState& state) const {
  const int np = p(), nm = M();
  const Vec r = bhat_ - state.phi * (A_ * state.mu_v);
  parallel_for(0, static_cast<std::size_t>(np), cfg_.threads,
               [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      const Eigen::Index jj = static_cast<Eigen::Index>(j);
      const double noise = state.xi * s2_(jj);
      double total = 0.0;
      for (int m = 0; m <= nm; ++m) {
        double dens;
        if (m == 0) {
          state.var_comp(jj, 0) = 0.0;
          state.mu_comp(jj, 0) = 0.0;
          dens = norm_pdf(r(jj), 0.0, noise);
        } else {
          const double tau2 = grid_.comps[m].tau * grid_.comps[m].tau;
          const double v = 1.0 / (1.0 / tau2 + 1.0 / noise);
          state.var_comp(jj, m) = v;
          state.mu_comp(jj, m) = r(jj) * v / noise;
          dens = norm_pdf(r(jj), 0.0, noise + tau2);
        }
        state.gamma(jj, m) = state.pi(m) * dens;
        total += state.gamma(jj, m);
      }
      if (total < kTiny) {
        state.gamma.row(jj).setZero();
        state.gamma(jj, 0) = 1.0;
      } else {
        state.gamma.row(jj) /= total;
      }
      state.mu_beta(jj) = state.gamma.row(jj).dot(state.mu_comp.row(jj));
    }
  });
}

BackwashState BackwashProblem::init_state() const {
  BackwashState st;
  const int np = p(), nm = M(), nq = q();
  st.pi = grid_.pi;
  st.phi = cfg_.estimate_phi ? 1.0 : cfg_.fixed_phi;
  st.xi = cfg_.estimate_xi ? 1.0 : cfg_.fixed_xi;
  st.gamma.resize(np, nm + 1);
  st.mu_comp.resize(np, nm + 1);
  st.var_comp.resize(np, nm + 1);
  st.mu_beta.resize(np);

  // No-confounder EB fit supplies the initial posterior means.
  MouthwashConfig ash_cfg;
  ash_cfg.kind = MixtureKind::kScaleNormal;
  ash_cfg.estimate_xi = false;
  ash_cfg.fixed_xi = 1.0;
  ash_cfg.grid = grid_;
  ash_cfg.lambda0 = penalty_.lambda(0);
  ash_cfg.threads = cfg_.threads;
  const MouthwashFit ash = fit_mouthwash_summary(bhat_, se_, Mat(0, np), ash_cfg);
  const Vec mu_beta0 = posterior_summaries(ash, cfg_.threads).post_mean;

  st.mu_v = init_confounder_mean(A_, s2_, bhat_, mu_beta0);
  st.sigma_v = Mat::Identity(nq, nq);
  // Populate the per-gene variational block so the initial state is complete.
  per_gene_update(st);
  return st;
}

void BackwashProblem::sweep(BackwashState& state, bool* jittered) const {
  const int nm = M(), nq = q();
  per_gene_update(state);

  // pi update with the Dirichlet-style penalty, normalized over components.
  Vec numer = state.gamma.colwise().sum().transpose() + penalty_.lambda - Vec::Ones(nm + 1);
  state.pi = numer / numer.sum();

  // Everything below only involves (sigma_v, mu_v, phi, xi); precompute the
  // per-gene reductions once and alternate the block updates to stationarity.
  // Each step remains the exact conditional maximizer, so the ELBO cannot
  // decrease; iterating removes the slow phi <-> mu_v zig-zag.
  Vec As_mu_beta = Vec::Zero(nq);
  for (int j = 0; j < p(); ++j) {
    As_mu_beta.noalias() += (state.mu_beta(j) / s2_(j)) * A_.row(j).transpose();
  }
  const Vec As_resid = As_bhat_ - As_mu_beta;
  double c0 = bhat_.dot(bhat_.cwiseQuotient(s2_));
  for (int j = 0; j < p(); ++j) {
    double second = 0.0;
    for (int m = 1; m <= nm; ++m) {
      second += state.gamma(j, m) *
                (state.mu_comp(j, m) * state.mu_comp(j, m) + state.var_comp(j, m));
    }
    second -= 2.0 * bhat_(j) * state.mu_beta(j);
    c0 += second / s2_(j);
  }

  for (int round = 0; round < 200; ++round) {
    const double phi_old = state.phi, xi_old = state.xi;
    const Vec mu_v_old = state.mu_v;

    Mat prec = (state.phi * state.phi / state.xi) * G_ + Mat::Identity(nq, nq);
    Eigen::LDLT<Mat> ldlt(prec);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      prec += 1e-12 * Mat::Identity(nq, nq);
      ldlt.compute(prec);
      if (jittered) *jittered = true;
      if (ldlt.info() != Eigen::Success) {
        throw SingularGram("backwash: covariance update failed");
      }
    }
    state.sigma_v = ldlt.solve(Mat::Identity(nq, nq));
    state.mu_v = (state.phi / state.xi) * (state.sigma_v * As_resid);

    // phi update; the closed form may go negative (sign absorbs into v).
    if (cfg_.estimate_phi) {
      const double num = state.mu_v.dot(As_resid);
      const double den = state.mu_v.dot(G_ * state.mu_v) + (G_ * state.sigma_v).trace();
      if (std::fabs(den) > kTiny) state.phi = num / den;
    }

    // xi update from the expected weighted residual sum of squares.
    if (cfg_.estimate_xi) {
      const Mat vv = state.mu_v * state.mu_v.transpose() + state.sigma_v;
      double braces = c0 + state.phi * state.phi * (G_ * vv).trace() -
                      2.0 * state.phi * state.mu_v.dot(As_resid);
      state.xi = std::max(braces / static_cast<double>(p()), 1e-12);
    }

    const double delta =
        std::fabs(state.phi - phi_old) / (std::fabs(phi_old) + 1.0) +
        std::fabs(state.xi - xi_old) / (xi_old + 1.0) +
        (state.mu_v - mu_v_old).lpNorm<Eigen::Infinity>() /
            (mu_v_old.lpNorm<Eigen::Infinity>() + 1.0);
    if (delta < 1e-13) break;
  }
}

double BackwashProblem::elbo(const BackwashState& state) const {
  const int np = p(), nm = M(), nq = q();
  const double xi = state.xi, phi = state.phi;

  // Expected weighted residual sum of squares (the braces of the xi update).
  double braces = bhat_.dot(bhat_.cwiseQuotient(s2_));
  for (int j = 0; j < np; ++j) {
    double second = 0.0;
    for (int m = 1; m <= nm; ++m) {
      second += state.gamma(j, m) *
                (state.mu_comp(j, m) * state.mu_comp(j, m) + state.var_comp(j, m));
    }
    second -= 2.0 * bhat_(j) * state.mu_beta(j);
    braces += second / s2_(j);
  }
  const Mat vv = state.mu_v * state.mu_v.transpose() + state.sigma_v;
  braces += phi * phi * (G_ * vv).trace();
  double mb_cross = 0.0;
  for (int j = 0; j < np; ++j) {
    mb_cross += state.mu_beta(j) / s2_(j) * A_.row(j).dot(state.mu_v);
  }
  braces += -2.0 * phi * state.mu_v.dot(As_bhat_) + 2.0 * phi * mb_cross;

  double elbo = -0.5 * np * std::log(2.0 * M_PI * xi) - 0.5 * s2_.array().log().sum() -
                0.5 * braces / xi;

  // Expected log prior of (beta, w) and entropy of the per-gene densities.
  for (int j = 0; j < np; ++j) {
    const double g0 = state.gamma(j, 0);
    if (g0 > 0.0) {
      elbo += g0 * std::log(std::max(state.pi(0), kTiny)) - xlogx(g0);
    }
    for (int m = 1; m <= nm; ++m) {
      const double g = state.gamma(j, m);
      if (g <= 0.0) continue;
      const double tau2 = grid_.comps[m].tau * grid_.comps[m].tau;
      const double mm = state.mu_comp(j, m), vv2 = state.var_comp(j, m);
      elbo += g * (std::log(std::max(state.pi(m), kTiny)) - 0.5 * std::log(2.0 * M_PI * tau2) -
                   0.5 * (mm * mm + vv2) / tau2);
      elbo -= g * (std::log(g) - 0.5 * std::log(2.0 * M_PI * vv2) - 0.5);
    }
  }

  // v prior and entropy.
  elbo += -0.5 * (state.mu_v.squaredNorm() + state.sigma_v.trace()) -
          0.5 * nq * std::log(2.0 * M_PI);
  Eigen::LDLT<Mat> ldlt(state.sigma_v);
  double logdet = 0.0;
  const Vec d = ldlt.vectorD();
  for (int i = 0; i < nq; ++i) logdet += std::log(std::max(d(i), kTiny));
  elbo += 0.5 * logdet + 0.5 * nq * std::log(2.0 * M_PI) + 0.5 * nq;

  // Weight penalty.
  for (int m = 0; m <= nm; ++m) {
    const double lm = penalty_.lambda(m);
    if (lm == 1.0) continue;
    if (state.pi(m) <= 0.0) return -kInf;
    elbo += (lm - 1.0) * std::log(state.pi(m));
  }
  return elbo;
}

BackwashFit fit_backwash_summary(const Vec& bhat, const Vec& se, const Mat& alpha,
                                 const BackwashConfig& cfg) {
  UnimodalMixture grid =
      cfg.grid ? *cfg.grid : default_grid(bhat, se, MixtureKind::kScaleNormal);
  PenaltySpec penalty = PenaltySpec::defaults(grid.M(), cfg.lambda0);
  BackwashProblem problem(bhat, se, alpha, grid, penalty, cfg);

  BackwashFit fit;
  BackwashState state = problem.init_state();
  double elbo_old = -kInf;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    problem.sweep(state, &fit.jittered);
    const double elbo_new = problem.elbo(state);
    fit.elbo_trace.push_back(elbo_new);
    if (iter > 0 && std::fabs(elbo_new - elbo_old) <= cfg.rel_tol * (std::fabs(elbo_old) + 1.0)) {
      fit.converged = true;
      elbo_old = elbo_new;
      break;
    }
    elbo_old = elbo_new;
  }
  fit.g_hat = problem.grid();
  fit.g_hat.pi = state.pi;
  fit.A = problem.A();
  fit.bhat = bhat;
  fit.se = se;
  fit.adjusted = bhat - state.phi * (fit.A * state.mu_v);
  fit.state = std::move(state);
  return fit;
}

BackwashFit fit_backwash(const RotatedModel& rm, const FactorEstimate& fa,
                         const BackwashConfig& cfg) {
  const Vec s2 = ols_standard_errors(rm, fa.sigma2);
  const Vec se = s2.array().sqrt();
  const Mat alpha = fa.alpha / rm.r22;
  return fit_backwash_summary(rm.betahat, se, alpha, cfg);
}

}  // namespace unwash
