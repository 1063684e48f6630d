#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "unwash/backwash.hpp"
#include "unwash/errors.hpp"
#include "unwash/mouthwash.hpp"
#include "unwash/posterior.hpp"
#include "unwash/prob.hpp"
#include "unwash/quadrature.hpp"

using namespace unwash;
using testutil::draw_from_model;
using testutil::random_matrix;
using testutil::random_vector;

TEST_CASE("confounder basis has orthonormal columns") {
  Rng rng(601);
  const Mat alpha = random_matrix(rng, 3, 200);
  const Mat A = confounder_basis(alpha);
  CHECK(A.rows() == 200);
  CHECK(A.cols() == 3);
  CHECK((A.transpose() * A - Mat::Identity(3, 3)).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("init_confounder_mean solves the weighted regression") {
  Rng rng(602);
  const int p = 80, q = 2;
  const Mat A = confounder_basis(random_matrix(rng, q, p));
  Vec s2(p);
  for (int j = 0; j < p; ++j) s2(j) = 0.3 + rng.uniform();
  const Vec bhat = random_vector(rng, p);
  const Vec mu_beta = random_vector(rng, p, 0.4);

  SUBCASE("zero residual gives zero coordinates") {
    const Vec mv = init_confounder_mean(A, s2, bhat, bhat);
    CHECK(mv.lpNorm<Eigen::Infinity>() < 1e-12);
  }
  SUBCASE("identity weights reduce to a projection") {
    const Vec ones = Vec::Ones(p);
    const Vec mv = init_confounder_mean(A, ones, bhat, mu_beta);
    const Vec expected = A.transpose() * (bhat - mu_beta);
    CHECK((mv - expected).lpNorm<Eigen::Infinity>() < 1e-10);
  }
  SUBCASE("general weights match the normal-equations oracle") {
    const Vec mv = init_confounder_mean(A, s2, bhat, mu_beta);
    Mat gram = Mat::Zero(q, q);
    Vec rhs = Vec::Zero(q);
    for (int j = 0; j < p; ++j) {
      gram += A.row(j).transpose() * A.row(j) / s2(j);
      rhs += A.row(j).transpose() * (bhat(j) - mu_beta(j)) / s2(j);
    }
    const Vec expected = gram.ldlt().solve(rhs);
    CHECK((mv - expected).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("phi fixed at zero reduces to the no-confounder EB fit") {
  Rng rng(603);
  const int p = 300, q = 2;
  auto d = draw_from_model(rng, p, q, 0.85, 1.0);
  BackwashConfig bw_cfg;
  bw_cfg.estimate_phi = false;
  bw_cfg.fixed_phi = 0.0;
  bw_cfg.estimate_xi = false;
  bw_cfg.fixed_xi = 1.0;
  // With phi = 0 each sweep is a plain EM step on the weights; run deep into
  // the sublinear tail so the comparison sees the shared optimum.
  bw_cfg.max_iters = 60000;
  bw_cfg.rel_tol = 1e-14;
  const BackwashFit bw = fit_backwash_summary(d.bhat, d.se, d.alpha, bw_cfg);

  MouthwashConfig mw_cfg;
  mw_cfg.estimate_xi = false;
  mw_cfg.grid = bw.g_hat;  // same grid, weights ignored by the solver init
  mw_cfg.grid->pi = default_grid(d.bhat, d.se, MixtureKind::kScaleNormal).pi;
  const MouthwashFit mw = fit_mouthwash_summary(d.bhat, d.se, Mat(0, p), mw_cfg);

  const GeneSummaries sb = posterior_summaries(bw);
  const GeneSummaries sm = posterior_summaries(mw);
  CHECK((sb.lfdr - sm.lfdr).lpNorm<Eigen::Infinity>() < 1e-4);
}

TEST_CASE("single-gene point-mass-only ELBO equals the exact log marginal") {
  // With one gene and only the point mass, beta = 0 a.s. and the variational
  // family contains the exact posterior of v, so the bound is tight.
  UnimodalMixture grid;
  grid.kind = MixtureKind::kScaleNormal;
  grid.comps = {MixtureComponent::point_mass()};
  grid.pi = Vec::Ones(1);
  const double bhat_val = 0.9, se_val = 0.7, phi = 1.3, xi = 0.8;
  Vec bhat(1), se(1);
  bhat << bhat_val;
  se << se_val;
  Mat alpha(1, 1);
  alpha << 2.0;
  BackwashConfig cfg;
  cfg.grid = grid;
  cfg.estimate_phi = false;
  cfg.fixed_phi = phi;
  cfg.estimate_xi = false;
  cfg.fixed_xi = xi;
  cfg.lambda0 = 1.0;
  PenaltySpec pen = PenaltySpec::defaults(0, 1.0);
  BackwashProblem problem(bhat, se, alpha, grid, pen, cfg);
  BackwashState state = problem.init_state();
  problem.sweep(state);
  const double elbo = problem.elbo(state);
  const double a1 = problem.A()(0, 0);  // +-1
  const double marginal = integrate(
      [&](double v) {
        return norm_pdf(bhat_val, phi * a1 * v, xi * se_val * se_val) * norm_pdf(v, 0.0, 1.0);
      },
      -12.0, 12.0, 1e-12);
  CHECK(elbo == doctest::Approx(std::log(marginal)).epsilon(1e-6));
}

TEST_CASE("ELBO lower-bounds the quadrature log marginal on a 3-gene instance") {
  Rng rng(604);
  const int p = 3, q = 1;
  Vec bhat = random_vector(rng, p);
  Vec se(p);
  for (int j = 0; j < p; ++j) se(j) = 0.6 + 0.3 * rng.uniform();
  const Mat alpha = random_matrix(rng, q, p);
  UnimodalMixture grid;
  grid.kind = MixtureKind::kScaleNormal;
  grid.comps = {MixtureComponent::point_mass(), MixtureComponent::normal(0.7),
                MixtureComponent::normal(1.9)};
  grid.pi = Vec(3);
  grid.pi << 0.5, 0.3, 0.2;
  BackwashConfig cfg;
  cfg.grid = grid;
  cfg.lambda0 = 10.0;
  const PenaltySpec pen = PenaltySpec::defaults(2, 10.0);
  BackwashProblem problem(bhat, se, alpha, grid, pen, cfg);
  BackwashState state = problem.init_state();
  const Mat A = problem.A();
  for (int sweeps = 0; sweeps < 8; ++sweeps) {
    problem.sweep(state);
    const double elbo = problem.elbo(state);
    // Penalized log marginal at the current (pi, phi, xi) by 1-d quadrature.
    auto gene_lik = [&](int j, double v) {
      const double mean = state.phi * A(j, 0) * v;
      double total = state.pi(0) * norm_pdf(bhat(j), mean, state.xi * se(j) * se(j));
      for (int m = 1; m <= 2; ++m) {
        const double tau = grid.comps[m].tau;
        total += state.pi(m) *
                 norm_pdf(bhat(j), mean, state.xi * se(j) * se(j) + tau * tau);
      }
      return total;
    };
    const double marginal = integrate(
        [&](double v) {
          double prod = norm_pdf(v, 0.0, 1.0);
          for (int j = 0; j < p; ++j) prod *= gene_lik(j, v);
          return prod;
        },
        -14.0, 14.0, 1e-13);
    double penalized = std::log(marginal);
    for (int m = 0; m <= 2; ++m) {
      if (pen.lambda(m) != 1.0) penalized += (pen.lambda(m) - 1.0) * std::log(state.pi(m));
    }
    CHECK(elbo <= penalized + 1e-8);
  }
}

TEST_CASE("a worse mu_v strictly lowers the ELBO") {
  Rng rng(605);
  const int p = 60, q = 2;
  auto d = draw_from_model(rng, p, q, 0.8, 1.0);
  BackwashConfig cfg;
  const UnimodalMixture grid = default_grid(d.bhat, d.se, MixtureKind::kScaleNormal);
  const PenaltySpec pen = PenaltySpec::defaults(grid.M(), cfg.lambda0);
  BackwashProblem problem(d.bhat, d.se, d.alpha, grid, pen, cfg);
  BackwashState state = problem.init_state();
  for (int i = 0; i < 3; ++i) problem.sweep(state);
  const double good = problem.elbo(state);
  BackwashState worse = state;
  worse.mu_v(0) += 0.5;
  CHECK(problem.elbo(worse) < good);
}

TEST_CASE("ELBO is nondecreasing across sweeps from a random start") {
  Rng rng(606);
  const int p = 200, q = 2;
  auto d = draw_from_model(rng, p, q, 0.9, 1.1);
  BackwashConfig cfg;
  cfg.max_iters = 100;
  const BackwashFit fit = fit_backwash_summary(d.bhat, d.se, d.alpha, cfg);
  REQUIRE(fit.elbo_trace.size() >= 2);
  for (std::size_t i = 1; i < fit.elbo_trace.size(); ++i) {
    CHECK(fit.elbo_trace[i] >= fit.elbo_trace[i - 1] - 1e-8);
  }
  // Per-gene variational weights stay on the simplex.
  for (Eigen::Index j = 0; j < fit.state.gamma.rows(); ++j) {
    CHECK(fit.state.gamma.row(j).sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("inference is invariant to orthogonal remixing of alpha") {
  Rng rng(607);
  const int p = 250, q = 2;
  auto d = draw_from_model(rng, p, q, 0.85, 1.0);
  BackwashConfig cfg;
  const BackwashFit base = fit_backwash_summary(d.bhat, d.se, d.alpha, cfg);
  const double ang = 0.9;
  Mat Q(2, 2);
  Q << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
  const BackwashFit mixed = fit_backwash_summary(d.bhat, d.se, Q * d.alpha, cfg);
  const GeneSummaries sb = posterior_summaries(base);
  const GeneSummaries sm = posterior_summaries(mixed);
  CHECK((sb.lfdr - sm.lfdr).lpNorm<Eigen::Infinity>() < 1e-6);
  CHECK(std::fabs(pi0(base) - pi0(mixed)) < 1e-6);
}

TEST_CASE("larger lambda0 weakly increases the fitted pi0") {
  Rng rng(608);
  const int p = 300, q = 2;
  auto d = draw_from_model(rng, p, q, 0.8, 1.0);
  BackwashConfig weak;
  weak.lambda0 = 1.0;
  BackwashConfig strong;
  strong.lambda0 = 50.0;
  const double pi_weak = pi0(fit_backwash_summary(d.bhat, d.se, d.alpha, weak));
  const double pi_strong = pi0(fit_backwash_summary(d.bhat, d.se, d.alpha, strong));
  CHECK(pi_strong >= pi_weak - 1e-9);
}

TEST_CASE("backwash configuration guards") {
  Rng rng(609);
  auto d = draw_from_model(rng, 50, 1, 0.9, 1.0);
  BackwashConfig cfg;
  cfg.grid = default_grid(d.bhat, d.se, MixtureKind::kSymmetricUniform);
  CHECK_THROWS_AS(fit_backwash_summary(d.bhat, d.se, d.alpha, cfg), ConfigError);
  BackwashConfig ok;
  CHECK_THROWS_AS(fit_backwash_summary(d.bhat, d.se, Mat(0, 50), ok), ConfigError);
}
