// Acceptance suite: one line per criterion, PASS/FAIL with details.
// Exercises the full pipeline at desk scale, including the CLI binary
// (UNWASH_BIN environment variable).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"
#include "unwash/backwash.hpp"
#include "unwash/data_model.hpp"
#include "unwash/evaluation.hpp"
#include "unwash/factor_analysis.hpp"
#include "unwash/mouthwash.hpp"
#include "unwash/posterior.hpp"
#include "unwash/prob.hpp"
#include "unwash/rotation.hpp"
#include "unwash/simulation.hpp"

using namespace unwash;
using testutil::draw_from_model;
using testutil::random_invertible;
using testutil::random_matrix;
using testutil::random_vector;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& msg) {
    if (!cond) {
      ok = false;
      if (!detail.str().empty()) detail << "; ";
      detail << msg;
    }
  }
};

std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(4);
  ss << x;
  return ss.str();
}

// ---------------------------------------------------------------- criterion 1

void criterion1_monotonicity(Check& check) {
  // EM sweeps.
  {
    Rng rng(9101);
    for (int rep = 0; rep < 50; ++rep) {
      auto d = draw_from_model(rng, 120, 2, 0.85, 0.9, 0.8 + 0.5 * rng.uniform());
      MouthwashConfig cfg;
      const UnimodalMixture grid = default_grid(d.bhat, d.se, MixtureKind::kScaleNormal);
      MouthwashProblem problem(d.bhat, d.se, d.alpha, grid,
                               PenaltySpec::defaults(grid.M(), 10.0), LikelihoodSpec{}, true, 1);
      MouthwashState state = problem.init_state();
      double obj = problem.penalized_objective(state);
      for (int it = 0; it < 12; ++it) {
        problem.em_normal_step(state);
        const double obj_new = problem.penalized_objective(state);
        check.expect(obj_new >= obj - 1e-10,
                     "EM decrease at rep " + std::to_string(rep) + " iter " + std::to_string(it) +
                         " by " + fmt(obj - obj_new));
        obj = obj_new;
      }
    }
  }
  // Coordinate-ascent sweeps (uniform mixtures, normal and t likelihoods).
  {
    Rng rng(9102);
    for (int rep = 0; rep < 50; ++rep) {
      auto d = draw_from_model(rng, 70, 2, 0.85, 0.9);
      MouthwashConfig cfg;
      cfg.kind = (rep % 2 == 0) ? MixtureKind::kSymmetricUniform : MixtureKind::kHalfUniform;
      LikelihoodSpec lik;
      if (rep % 3 == 0) lik = LikelihoodSpec{true, 4.0};
      const UnimodalMixture grid = default_grid(d.bhat, d.se, cfg.kind);
      MouthwashProblem problem(d.bhat, d.se, d.alpha, grid,
                               PenaltySpec::defaults(grid.M(), 10.0), lik, true, 1);
      MouthwashState state = problem.init_state();
      double obj = problem.penalized_objective(state);
      for (int it = 0; it < 6; ++it) {
        problem.coord_ascent_step(state);
        const double obj_new = problem.penalized_objective(state);
        check.expect(obj_new >= obj - 1e-10,
                     "coord decrease at rep " + std::to_string(rep) + " iter " +
                         std::to_string(it) + " by " + fmt(obj - obj_new));
        obj = obj_new;
      }
    }
  }
  // Control-gene t-error EM.
  {
    Rng rng(9103);
    for (int rep = 0; rep < 50; ++rep) {
      const int m = 80, q = 2;
      const Mat alpha = random_matrix(rng, q, m);
      const Vec z_true = random_vector(rng, q);
      Vec s2(m), bhat(m);
      for (int j = 0; j < m; ++j) s2(j) = 0.3 + rng.uniform();
      for (int j = 0; j < m; ++j) {
        bhat(j) = alpha.col(j).dot(z_true) + rng.normal(0.0, 1.3 * std::sqrt(s2(j)));
      }
      const ControlGeneFit fit =
          control_gene_tem(bhat, alpha, s2, Vec::Constant(m, 5.0), Vec::Zero(q), 1.0);
      for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i) {
        check.expect(fit.loglik_trace[i] >= fit.loglik_trace[i - 1] - 1e-10,
                     "t-EM decrease at rep " + std::to_string(rep));
      }
    }
  }
  // BACKWASH ELBO.
  {
    Rng rng(9104);
    for (int rep = 0; rep < 50; ++rep) {
      auto d = draw_from_model(rng, 100, 2, 0.9, 0.9);
      BackwashConfig cfg;
      const UnimodalMixture grid = default_grid(d.bhat, d.se, MixtureKind::kScaleNormal);
      BackwashProblem problem(d.bhat, d.se, d.alpha, grid,
                              PenaltySpec::defaults(grid.M(), 10.0), cfg);
      BackwashState state = problem.init_state();
      double elbo = -kInf;
      for (int it = 0; it < 10; ++it) {
        problem.sweep(state);
        const double elbo_new = problem.elbo(state);
        check.expect(elbo_new >= elbo - 1e-8,
                     "ELBO decrease at rep " + std::to_string(rep) + " iter " +
                         std::to_string(it) + " by " + fmt(elbo - elbo_new));
        elbo = elbo_new;
      }
    }
  }
}

// ---------------------------------------------------------------- criterion 2

void criterion2_rowspace(Check& check) {
  Rng rng(9201);
  for (int rep = 0; rep < 20; ++rep) {
    const int p = 200, q = 2;
    auto d = draw_from_model(rng, p, q, 0.85, 1.0);
    MouthwashConfig cfg;
    cfg.max_iters = 300;
    const MouthwashFit base = fit_mouthwash_summary(d.bhat, d.se, d.alpha, cfg);
    const Mat A = random_invertible(rng, q);
    const MouthwashFit mapped = fit_mouthwash_summary(d.bhat, d.se, A * d.alpha, cfg);
    const double dpi = (base.g_hat.pi - mapped.g_hat.pi).lpNorm<Eigen::Infinity>();
    check.expect(dpi < 1e-6, "rep " + std::to_string(rep) + ": pi gap " + fmt(dpi));
    const GeneSummaries sb = posterior_summaries(base);
    const GeneSummaries sm = posterior_summaries(mapped);
    const double dlfdr = (sb.lfdr - sm.lfdr).lpNorm<Eigen::Infinity>();
    const double dlfsr = (sb.lfsr - sm.lfsr).lpNorm<Eigen::Infinity>();
    check.expect(dlfdr < 1e-6, "rep " + std::to_string(rep) + ": lfdr gap " + fmt(dlfdr));
    check.expect(dlfsr < 1e-6, "rep " + std::to_string(rep) + ": lfsr gap " + fmt(dlfsr));
  }
}

// ---------------------------------------------------------------- criterion 3

void criterion3_oracles(Check& check) {
  // (a) q = 0, xi = 1 objective vs an independent convex weights solver.
  {
    Rng rng(9301);
    auto d = draw_from_model(rng, 300, 0, 0.6, 1.5);
    MouthwashConfig cfg;
    cfg.estimate_xi = false;
    cfg.max_iters = 20000;
    cfg.rel_tol = 1e-13;
    const MouthwashFit fit = fit_mouthwash_summary(d.bhat, d.se, Mat(0, 300), cfg);
    const UnimodalMixture grid = default_grid(d.bhat, d.se, MixtureKind::kScaleNormal);
    MouthwashProblem problem(d.bhat, d.se, Mat(0, 300), grid,
                             PenaltySpec::defaults(grid.M(), 10.0), LikelihoodSpec{}, false, 1);
    const Mat L = problem.component_likelihoods(Vec::Zero(300), 1.0);
    const Vec lambda = PenaltySpec::defaults(grid.M(), 10.0).lambda;
    const Vec pi_oracle = oracles::projected_gradient_weights(L, lambda, grid.pi, 200000);
    auto objective = [&](const Vec& pi) {
      double obj = 0.0;
      for (Eigen::Index j = 0; j < L.rows(); ++j) obj += std::log(L.row(j).dot(pi));
      for (Eigen::Index m = 0; m < pi.size(); ++m) {
        if (lambda(m) != 1.0 && pi(m) > 0.0) obj += (lambda(m) - 1.0) * std::log(pi(m));
      }
      return obj;
    };
    const double gap = std::fabs(objective(fit.g_hat.pi) - objective(pi_oracle));
    check.expect(gap < 1e-4, "(a) convex objective gap " + fmt(gap));
  }
  // (b) per-gene posteriors vs adaptive quadrature, normal and uniform kinds.
  {
    Rng rng(9302);
    const int p = 20;
    const Vec bhat = random_vector(rng, p, 2.0);
    Vec se(p);
    for (int j = 0; j < p; ++j) se(j) = 0.4 + rng.uniform();
    for (MixtureKind kind : {MixtureKind::kScaleNormal, MixtureKind::kSymmetricUniform,
                             MixtureKind::kHalfUniform}) {
      UnimodalMixture grid = default_grid(bhat, se, kind);
      for (int m = 0; m <= grid.M(); ++m) grid.pi(m) = 0.15 + rng.uniform();
      grid.pi /= grid.pi.sum();
      MouthwashProblem problem(bhat, se, Mat(0, p), grid,
                               PenaltySpec::defaults(grid.M(), 1.0), LikelihoodSpec{}, false, 1);
      MouthwashState state;
      state.pi = grid.pi;
      state.z = Vec(0);
      state.xi = 1.1;
      MouthwashFit fit;
      fit.g_hat = grid;
      fit.z_hat = Vec(0);
      fit.xi_hat = state.xi;
      fit.responsibilities = problem.responsibilities(state);
      fit.bhat_w = bhat;
      fit.shat_w = se;
      fit.offset_w = Vec::Zero(p);
      fit.scale = Vec::Ones(p);
      fit.betahat_raw = bhat;
      fit.se_raw = se;
      const GeneSummaries s = posterior_summaries(fit);
      for (int j = 0; j < p; ++j) {
        const auto oracle = oracles::quadrature_posterior(grid, bhat(j), 0.0,
                                                          state.xi * se(j) * se(j),
                                                          LikelihoodSpec{});
        check.expect(std::fabs(s.lfdr(j) - oracle.lfdr) < 1e-6, "(b) lfdr gene " + std::to_string(j));
        check.expect(std::fabs(s.lfsr(j) - oracle.lfsr) < 1e-6, "(b) lfsr gene " + std::to_string(j));
        check.expect(std::fabs(s.post_mean(j) - oracle.mean) < 1e-6,
                     "(b) mean gene " + std::to_string(j));
      }
    }
  }
  // (c) t-uniform z gradient vs central finite differences, 20 random states.
  {
    Rng rng(9303);
    for (int rep = 0; rep < 20; ++rep) {
      const int p = 40, q = 2;
      auto d = draw_from_model(rng, p, q, 0.8, 1.0);
      MouthwashConfig cfg;
      cfg.kind = (rep % 2 == 0) ? MixtureKind::kSymmetricUniform : MixtureKind::kHalfUniform;
      const LikelihoodSpec lik{true, 3.0 + 4.0 * rng.uniform()};
      const UnimodalMixture grid = default_grid(d.bhat, d.se, cfg.kind);
      MouthwashProblem problem(d.bhat, d.se, d.alpha, grid,
                               PenaltySpec::defaults(grid.M(), 10.0), lik, true, 1);
      MouthwashState state = problem.init_state();
      state.z = random_vector(rng, q, 0.7);
      state.xi = 0.8 + 0.4 * rng.uniform();
      for (int m = 0; m <= problem.M(); ++m) state.pi(m) = 0.05 + rng.uniform();
      state.pi /= state.pi.sum();
      const Vec grad = problem.loglik_grad_z(state);
      MouthwashState probe = state;
      const Vec fd = oracles::finite_difference_grad(
          [&](const Vec& z) {
            probe.z = z;
            return problem.loglik(probe);
          },
          state.z, 1e-5);
      const double scale = std::max(1.0, fd.lpNorm<Eigen::Infinity>());
      const double gap = (grad - fd).lpNorm<Eigen::Infinity>() / scale;
      check.expect(gap <= 1e-5, "(c) gradient rel gap " + fmt(gap) + " rep " + std::to_string(rep));
    }
  }
  // (d) AUC equals exhaustive pair enumeration on small instances.
  {
    Rng rng(9304);
    for (int rep = 0; rep < 30; ++rep) {
      const int p = 10 + static_cast<int>(rng.next_u64() % 41);
      Vec scores(p);
      std::vector<bool> is_null(p);
      int nulls = 0;
      for (int j = 0; j < p; ++j) {
        scores(j) = std::floor(rng.uniform() * 8.0) / 2.0;
        is_null[j] = rng.uniform() < 0.5;
        nulls += is_null[j];
      }
      if (nulls == 0 || nulls == p) is_null[0] = !is_null[0];
      const double got = auc(scores, is_null);
      const double want = oracles::pair_enum_auc(scores, is_null);
      check.expect(got == want, "(d) AUC mismatch rep " + std::to_string(rep));
    }
  }
}

// ---------------------------------------------------------------- criterion 4

void criterion4_simulation_study(Check& check) {
  const int n = 40, p = 1000, reps = 20, q = 2;
  const double strength = 0.8;

  auto run_cell = [&](double pi0_true, std::vector<double>* mw_pi0, std::vector<double>* bw_pi0,
                      std::vector<double>* ols_pi0, std::vector<double>* mw_auc,
                      std::vector<double>* ols_auc) {
    for (int rep = 0; rep < reps; ++rep) {
      SimulationConfig cfg;
      cfg.n = n;
      cfg.p = p;
      cfg.pi0 = pi0_true;
      cfg.uv_rank = 2;
      cfg.uv_strength = strength;
      cfg.seed = 5000 + static_cast<std::uint64_t>(rep) +
                 static_cast<std::uint64_t>(1000.0 * pi0_true);
      const SimulatedStudy study = simulate(cfg);
      const ExpressionDataset ds = validate_dataset(study.Y, design_matrix(study), 2);
      const RotatedModel rm = rotate(ds);

      const FactorEstimate fa = truncated_pca(rm.Y3, q);
      MouthwashConfig mw_cfg;
      mw_cfg.threads = 2;
      const MouthwashFit mw = fit_mouthwash(rm, fa, mw_cfg);
      mw_pi0->push_back(pi0(mw));

      if (bw_pi0) {
        BackwashConfig bw_cfg;
        bw_cfg.threads = 2;
        const BackwashFit bw = fit_backwash(rm, fa, bw_cfg);
        bw_pi0->push_back(pi0(bw));
      }

      const FactorEstimate fa0 = truncated_pca(rm.Y3, 0);
      MouthwashConfig ols_cfg;
      ols_cfg.estimate_xi = false;
      ols_cfg.threads = 2;
      const MouthwashFit ols = fit_mouthwash(rm, fa0, ols_cfg);
      ols_pi0->push_back(pi0(ols));

      if (mw_auc) {
        const GeneSummaries sm = posterior_summaries(mw, 2);
        const GeneSummaries so = posterior_summaries(ols, 2);
        mw_auc->push_back(auc(1.0 - sm.lfdr.array(), study.is_null));
        ols_auc->push_back(auc(1.0 - so.lfdr.array(), study.is_null));
      }
    }
  };

  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto sd = [&](const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };

  // (i) pi0 = 1 cell.
  {
    std::vector<double> mw_pi0, bw_pi0, ols_pi0;
    run_cell(1.0, &mw_pi0, &bw_pi0, &ols_pi0, nullptr, nullptr);
    const double mw_mean = mean(mw_pi0), bw_mean = mean(bw_pi0);
    check.expect(mw_mean >= 0.95, "(i) mean MOUTHWASH pi0 " + fmt(mw_mean) + " < 0.95");
    check.expect(bw_mean >= 0.95, "(i) mean BACKWASH pi0 " + fmt(bw_mean) + " < 0.95");
    check.expect(std::fabs(mw_mean - bw_mean) <= 0.05,
                 "(i) MOUTHWASH/BACKWASH gap " + fmt(std::fabs(mw_mean - bw_mean)));
    check.detail << "[pi0=1: mw " << fmt(mw_mean) << ", bw " << fmt(bw_mean) << "] ";
  }
  // (ii)+(iii) pi0 = 0.9 cell.
  {
    std::vector<double> mw_pi0, ols_pi0, mw_auc, ols_auc;
    run_cell(0.9, &mw_pi0, nullptr, &ols_pi0, &mw_auc, &ols_auc);
    const double mw_sd = sd(mw_pi0), ols_sd = sd(ols_pi0);
    check.expect(mw_sd < ols_sd,
                 "(ii) sd(MOUTHWASH pi0) " + fmt(mw_sd) + " !< sd(OLS pi0) " + fmt(ols_sd));
    const double mw_auc_mean = mean(mw_auc), ols_auc_mean = mean(ols_auc);
    check.expect(mw_auc_mean >= ols_auc_mean,
                 "(iii) mean AUC mouthwash " + fmt(mw_auc_mean) + " < ols " + fmt(ols_auc_mean));
    check.detail << "[pi0=0.9: sd mw " << fmt(mw_sd) << " vs ols " << fmt(ols_sd) << "; auc mw "
                 << fmt(mw_auc_mean) << " vs ols " << fmt(ols_auc_mean) << "] ";
  }
}

// ---------------------------------------------------------------- criterion 5

void criterion5_thinning(Check& check) {
  Rng rng(9501);
  const int draws = 10000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const long z = rng.poisson(1000.0);
    const long w = rng.binomial(z, std::exp2(-1.0));
    sum += static_cast<double>(w);
    sumsq += static_cast<double>(w) * static_cast<double>(w);
  }
  const double mean = sum / draws;
  const double sd = std::sqrt(sumsq / draws - mean * mean);
  const double se = sd / std::sqrt(static_cast<double>(draws));
  check.expect(std::fabs(mean - 500.0) <= 3.0 * se,
               "thinned mean " + fmt(mean) + " outside 500 +- 3 * " + fmt(se));
  check.detail << "mean " << fmt(mean) << " (se " << fmt(se) << ")";
}

// ---------------------------------------------------------------- criterion 6

void criterion6_performance(Check& check) {
  SimulationConfig cfg;
  cfg.n = 100;
  cfg.p = 10000;
  cfg.pi0 = 0.5;
  cfg.uv_rank = 5;
  cfg.uv_strength = 0.8;
  cfg.seed = 777;
  const SimulatedStudy study = simulate(cfg);
  const ExpressionDataset ds = validate_dataset(study.Y, design_matrix(study), 2);
  const RotatedModel rm = rotate(ds);
  const FactorEstimate fa = truncated_pca(rm.Y3, 5);

  const auto t0 = std::chrono::steady_clock::now();
  MouthwashConfig full_cfg;
  full_cfg.threads = 2;
  const MouthwashFit full = fit_mouthwash(rm, fa, full_cfg);
  const GeneSummaries full_summ = posterior_summaries(full, 2);
  const double full_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  check.expect(full_seconds < 600.0, "full fit took " + fmt(full_seconds) + " s");

  const auto t1 = std::chrono::steady_clock::now();
  MouthwashConfig sub_cfg = full_cfg;
  sub_cfg.subsample = 1000;
  sub_cfg.seed = 4242;
  const MouthwashFit sub = fit_mouthwash(rm, fa, sub_cfg);
  const GeneSummaries sub_summ = posterior_summaries(sub, 2);
  const double sub_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
  check.expect(sub_seconds < 60.0, "subsampled fit took " + fmt(sub_seconds) + " s");

  const double rho = spearman(full_summ.lfdr, sub_summ.lfdr);
  check.expect(rho >= 0.99, "lfdr Spearman " + fmt(rho) + " < 0.99");
  check.detail << "full " << fmt(full_seconds) << " s, subsampled " << fmt(sub_seconds)
               << " s, spearman " << fmt(rho);
}

// ---------------------------------------------------------------- criterion 7

void criterion7_cli_determinism(Check& check) {
  const char* bin = std::getenv("UNWASH_BIN");
  if (!bin) {
    check.expect(false, "UNWASH_BIN not set");
    return;
  }
  const fs::path dir = fs::temp_directory_path() / "unwash_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run = [&](const std::string& args) {
    const std::string cmd = std::string(bin) + " " + args + " > /dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string study1 = (dir / "study1").string();
  const std::string study2 = (dir / "study2").string();
  check.expect(run("simulate --n 12 --p 300 --pi0 0.9 --uv-rank 2 --uv-strength 0.8 --seed 99 "
                   "--out " + study1) == 0, "simulate run 1 failed");
  check.expect(run("simulate --n 12 --p 300 --pi0 0.9 --uv-rank 2 --uv-strength 0.8 --seed 99 "
                   "--out " + study2) == 0, "simulate run 2 failed");
  for (const char* name : {"counts.csv", "y.csv", "x.csv", "truth.csv", "groups.csv"}) {
    check.expect(slurp(dir / "study1" / name) == slurp(dir / "study2" / name),
                 std::string("simulate outputs differ: ") + name);
  }
  struct FitRun {
    const char* out;
    const char* threads;
  };
  for (const FitRun& fr : {FitRun{"fit_a", "1"}, FitRun{"fit_b", "4"}, FitRun{"fit_c", "1"}}) {
    const int code = run("fit --y " + study1 + "/y.csv --x " + study1 +
                         "/x.csv --q 2 --seed 5 --threads " + fr.threads + " --out " +
                         (dir / fr.out).string());
    check.expect(code == 0 || code == 2, std::string("fit failed: ") + fr.out);
  }
  check.expect(slurp(dir / "fit_a" / "per_gene.csv") == slurp(dir / "fit_b" / "per_gene.csv"),
               "per-gene CSV differs across thread counts");
  check.expect(slurp(dir / "fit_a" / "per_gene.csv") == slurp(dir / "fit_c" / "per_gene.csv"),
               "per-gene CSV differs across reruns");
  check.expect(slurp(dir / "fit_a" / "model.json") == slurp(dir / "fit_b" / "model.json"),
               "model JSON differs across thread counts");
  check.expect(slurp(dir / "fit_a" / "model.json") == slurp(dir / "fit_c" / "model.json"),
               "model JSON differs across reruns");
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<void(Check&)> fn;
  };
  const std::vector<Criterion> criteria{
      {"1 monotonicity (EM, coord ascent, control-gene t-EM, ELBO; 50 instances each)",
       criterion1_monotonicity},
      {"2 rowspace invariance (20 datasets, random invertible remixing)", criterion2_rowspace},
      {"3 oracle equivalences (convex weights, quadrature posteriors, z gradient, AUC)",
       criterion3_oracles},
      {"4 desk-scale simulation study (n=40, p=1000, rank-2 planted factors, 20 reps)",
       criterion4_simulation_study},
      {"5 thinning identity (lambda=1000, a=-1, 1e4 draws)", criterion5_thinning},
      {"6 performance envelope (n=100, p=10000, q=5; full and subsampled)",
       criterion6_performance},
      {"7 CLI determinism (same seed, reruns, threads 1 and 4)", criterion7_cli_determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criterion.fn(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "[" << (check.ok ? "PASS" : "FAIL") << "] criterion " << criterion.name << " ("
              << fmt(seconds) << " s)";
    if (!check.detail.str().empty()) std::cout << " -- " << check.detail.str();
    std::cout << std::endl;
    if (!check.ok) ++failures;
  }
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all acceptance criteria passed" << std::endl;
  return 0;
}
