#include "unwash/mouthwash.hpp"

#include <cmath>
#include <string>

#include "unwash/errors.hpp"
#include "unwash/optim.hpp"
#include "unwash/parallel.hpp"
#include "unwash/prob.hpp"
#include "unwash/rng.hpp"

namespace unwash {

namespace {

constexpr double kXiLo = 1e-3;
constexpr double kXiHi = 1e3;
constexpr double kTinyDensity = 1e-300;
constexpr std::uint64_t kTagSubsample = 0x53756273616d70ULL;
constexpr std::uint64_t kTagRestart = 0x52657374617274ULL;

// Compensated (Kahan) sum; keeps objective evaluations reproducible and
// accurate enough for the 1e-10 monotonicity slack.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

}  // namespace

void MouthwashConfig::validate() const {
  if (likelihood.student_t) {
    if (kind == MixtureKind::kScaleNormal) {
      throw ConfigError("t likelihood requires a uniform mixture kind");
    }
    if (!(likelihood.nu > 0.0)) throw ConfigError("t likelihood requires nu > 0");
  }
  if (gamma != 0 && gamma != 1) throw ConfigError("gamma must be 0 or 1");
  if (lambda0 < 1.0) throw ConfigError("lambda0 must be >= 1");
  if (lambda_xi < 0.0) throw ConfigError("lambda_xi must be >= 0");
  if (!estimate_xi && !(fixed_xi > 0.0)) throw ConfigError("fixed xi must be positive");
  if (max_iters < 1 || rel_tol <= 0.0) throw ConfigError("bad iteration controls");
}

MouthwashProblem::MouthwashProblem(Vec bhat, Vec shat, Mat alpha, UnimodalMixture grid,
                                   PenaltySpec penalty, LikelihoodSpec lik, bool estimate_xi,
                                   int threads)
    : bhat_(std::move(bhat)),
      shat_(std::move(shat)),
      alpha_(std::move(alpha)),
      grid_(std::move(grid)),
      penalty_(std::move(penalty)),
      lik_(lik),
      estimate_xi_(estimate_xi),
      threads_(threads < 1 ? 1 : threads) {
  grid_.check();
  if (shat_.size() != bhat_.size() || alpha_.cols() != bhat_.size()) {
    throw DimensionMismatch("mouthwash problem: inconsistent dimensions");
  }
  if ((shat_.array() <= 0.0).any()) throw NonPositiveVariance("standard errors must be positive");
  if (penalty_.lambda.size() != grid_.pi.size()) {
    throw DimensionMismatch("penalty lambda length must be M + 1");
  }
  if ((penalty_.lambda.array() < 1.0).any()) throw ConfigError("lambda_m must be >= 1");
  s2_ = shat_.array().square();
}

Vec MouthwashProblem::offset(const Vec& z) const {
  if (q() == 0) return Vec::Zero(p());
  return alpha_.transpose() * z;
}

MouthwashState MouthwashProblem::init_state() const {
  MouthwashState st;
  st.pi = grid_.pi;
  st.xi = 1.0;
  if (q() > 0) {
    // GLS of bhat on alpha' with weights 1/s^2.
    Mat gram = Mat::Zero(q(), q());
    Vec rhs = Vec::Zero(q());
    for (int j = 0; j < p(); ++j) {
      const double w = 1.0 / s2_(j);
      gram.noalias() += w * alpha_.col(j) * alpha_.col(j).transpose();
      rhs.noalias() += w * bhat_(j) * alpha_.col(j);
    }
    Eigen::LDLT<Mat> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw SingularWeightedGram("initial GLS Gram matrix is singular");
    }
    st.z = ldlt.solve(rhs);
  } else {
    st.z = Vec(0);
  }
  return st;
}

Mat MouthwashProblem::component_likelihoods(const Vec& offset, double xi) const {
  const int np = p(), nm = M();
  Mat L(np, nm + 1);
  parallel_for(0, static_cast<std::size_t>(np), threads_, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      const Eigen::Index jj = static_cast<Eigen::Index>(j);
      for (int m = 0; m <= nm; ++m) {
        L(jj, m) = component_convolved_density(grid_.comps[m], bhat_(jj), offset(jj),
                                               xi * s2_(jj), lik_);
      }
    }
  });
  return L;
}

Mat MouthwashProblem::responsibilities(const MouthwashState& state) const {
  Mat L = component_likelihoods(offset(state.z), state.xi);
  const int np = p(), nm = M();
  parallel_for(0, static_cast<std::size_t>(np), threads_, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      const Eigen::Index jj = static_cast<Eigen::Index>(j);
      double total = 0.0;
      for (int m = 0; m <= nm; ++m) {
        L(jj, m) *= state.pi(m);
        total += L(jj, m);
      }
      if (total < kTinyDensity) {
        L.row(jj).setZero();
        L(jj, 0) = 1.0;  // collapse to the point mass on a fully degenerate gene
      } else {
        L.row(jj) /= total;
      }
    }
  });
  return L;
}

double MouthwashProblem::loglik(const MouthwashState& state) const {
  const Mat L = component_likelihoods(offset(state.z), state.xi);
  KahanSum ll;
  for (int j = 0; j < p(); ++j) {
    const double total = L.row(j).dot(state.pi.transpose());
    ll.add(std::log(std::max(total, kTinyDensity)));
  }
  return ll.value();
}

double MouthwashProblem::penalized_objective(const MouthwashState& state) const {
  UnimodalMixture g = grid_;
  g.pi = state.pi;
  return penalized_log_objective(g, penalty_, loglik(state), state.xi);
}

double MouthwashProblem::brent_update_xi(const std::function<double(double)>& objective,
                                         double xi_cur) const {
  const double cur_val = objective(xi_cur);
  auto on_log = [&](double u) { return objective(std::exp(u)); };
  const BrentResult res = brent_maximize(on_log, std::log(kXiLo), std::log(kXiHi), 1e-10, 120);
  const double xi_new = std::exp(res.x);
  return (res.fx > cur_val) ? xi_new : xi_cur;
}

// Expected complete-data log-likelihood terms that depend on (z, xi), with
// responsibilities held fixed; used by the EM xi update.
double MouthwashProblem::xi_objective_em(const Mat& resp, const Vec& offset, double xi) const {
  KahanSum acc;
  const int np = p(), nm = M();
  for (int j = 0; j < np; ++j) {
    const double r = bhat_(j) - offset(j);
    const double r2 = r * r;
    for (int m = 0; m <= nm; ++m) {
      const double tau = grid_.comps[m].type == MixtureComponent::Type::kNormal
                             ? grid_.comps[m].tau
                             : 0.0;
      const double v = xi * s2_(j) + tau * tau;
      acc.add(-resp(j, m) * (0.5 * r2 / v + 0.5 * std::log(v)));
    }
  }
  double val = acc.value();
  if (penalty_.lambda_xi > 0.0) val -= penalty_.lambda_xi / xi;
  return val;
}

void MouthwashProblem::em_normal_step(MouthwashState& state) const {
  if (lik_.student_t || grid_.kind != MixtureKind::kScaleNormal) {
    throw ConfigError("em_normal_step requires the scale-normal mixture and normal likelihood");
  }
  const int np = p(), nm = M(), nq = q();
  const Mat resp = responsibilities(state);

  // pi update: multinomial kernel plus Dirichlet-style penalty. Normalized
  // over all M + 1 components so pi stays on the simplex.
  Vec counts = resp.colwise().sum().transpose();
  Vec numer = counts + penalty_.lambda - Vec::Ones(nm + 1);
  state.pi = numer / numer.sum();

  // Inner alternation on (z, xi) for the expected complete log-likelihood.
  Vec off = offset(state.z);
  for (int inner = 0; inner < 10; ++inner) {
    bool moved = false;
    if (nq > 0) {
      // Weighted regression with diagonal weights theta_j = sum_m q_mj / (xi s_j^2 + tau_m^2).
      Vec theta = Vec::Zero(np);
      for (int j = 0; j < np; ++j) {
        double t = 0.0;
        for (int m = 0; m <= nm; ++m) {
          const double tau = grid_.comps[m].tau;
          t += resp(j, m) / (state.xi * s2_(j) + tau * tau);
        }
        theta(j) = t;
      }
      Mat gram = Mat::Zero(nq, nq);
      Vec rhs = Vec::Zero(nq);
      for (int j = 0; j < np; ++j) {
        gram.noalias() += theta(j) * alpha_.col(j) * alpha_.col(j).transpose();
        rhs.noalias() += theta(j) * bhat_(j) * alpha_.col(j);
      }
      Eigen::LDLT<Mat> ldlt(gram);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw SingularWeightedGram("EM z update: weighted Gram matrix is singular");
      }
      const Vec z_new = ldlt.solve(rhs);
      if ((z_new - state.z).lpNorm<Eigen::Infinity>() >
          1e-10 * (1.0 + state.z.lpNorm<Eigen::Infinity>())) {
        moved = true;
      }
      state.z = z_new;
      off = offset(state.z);
    }
    if (estimate_xi_) {
      const double xi_new = brent_update_xi(
          [&](double xi) { return xi_objective_em(resp, off, xi); }, state.xi);
      if (std::fabs(xi_new - state.xi) > 1e-10 * (1.0 + state.xi)) moved = true;
      state.xi = xi_new;
    }
    if (!moved) break;
    if (nq == 0 && !estimate_xi_) break;
  }
}

Vec MouthwashProblem::loglik_grad_z(const MouthwashState& state) const {
  const int np = p(), nm = M(), nq = q();
  const Vec off = offset(state.z);
  Vec per_gene(np);
  parallel_for(0, static_cast<std::size_t>(np), threads_, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      const Eigen::Index jj = static_cast<Eigen::Index>(j);
      const double s2 = state.xi * s2_(jj);
      const double r = bhat_(jj) - off(jj);
      double total = 0.0, dsum = 0.0;
      for (int m = 0; m <= nm; ++m) {
        const auto& comp = grid_.comps[m];
        const double dens =
            component_convolved_density(comp, bhat_(jj), off(jj), s2, lik_);
        total += state.pi(m) * dens;
        double deriv;  // d/d(center) of the convolved component density
        if (comp.type == MixtureComponent::Type::kPointMass) {
          deriv = lik_.student_t
                      ? (lik_.nu + 1.0) * r / (lik_.nu * s2 + r * r) * dens
                      : r / s2 * dens;
        } else if (comp.type == MixtureComponent::Type::kNormal) {
          const double v = s2 + comp.tau * comp.tau;
          deriv = r / v * dens;
        } else {
          const double hi_dens = lik_.student_t ? t_pdf(bhat_(jj), off(jj) + comp.b, s2, lik_.nu)
                                                : norm_pdf(bhat_(jj), off(jj) + comp.b, s2);
          const double lo_dens = lik_.student_t ? t_pdf(bhat_(jj), off(jj) + comp.a, s2, lik_.nu)
                                                : norm_pdf(bhat_(jj), off(jj) + comp.a, s2);
          deriv = (hi_dens - lo_dens) / (comp.b - comp.a);
        }
        dsum += state.pi(m) * deriv;
      }
      per_gene(jj) = dsum / std::max(total, kTinyDensity);
    }
  });
  Vec grad = Vec::Zero(nq);
  for (int j = 0; j < np; ++j) grad.noalias() += per_gene(j) * alpha_.col(j);
  return grad;
}

void MouthwashProblem::coord_ascent_step(MouthwashState& state, bool* line_search_failed) const {
  if (grid_.kind == MixtureKind::kScaleNormal) {
    throw ConfigError("coord_ascent_step requires a uniform mixture kind");
  }
  const int nq = q();
  // z update: quasi-Newton ascent of the marginal log-likelihood.
  if (nq > 0) {
    Mat gram0 = Mat::Zero(nq, nq);
    for (int j = 0; j < p(); ++j) {
      gram0.noalias() += (1.0 / (state.xi * s2_(j))) * alpha_.col(j) * alpha_.col(j).transpose();
    }
    Mat h0;
    Eigen::LDLT<Mat> ldlt(gram0);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      h0 = ldlt.solve(Mat::Identity(nq, nq));
    } else {
      h0 = Mat::Identity(nq, nq);
    }
    MouthwashState probe = state;
    auto f_grad = [&](const Vec& z, Vec* grad) {
      probe.z = z;
      if (grad) *grad = loglik_grad_z(probe);
      return loglik(probe);
    };
    const BfgsResult res = bfgs_maximize(f_grad, state.z, h0, 50, 1e-10);
    if (res.line_search_failed && line_search_failed) *line_search_failed = true;
    if (res.fx >= f_grad(state.z, nullptr)) state.z = res.x;
  }
  // pi update: convex weights subproblem at fixed (z, xi).
  {
    const Mat L = component_likelihoods(offset(state.z), state.xi);
    state.pi = optimize_weights(L, state.pi, penalty_.lambda, 100, 1e-12);
  }
  // xi update: scalar maximization of the penalized marginal likelihood.
  if (estimate_xi_) {
    MouthwashState probe = state;
    state.xi = brent_update_xi(
        [&](double xi) {
          probe.xi = xi;
          double val = loglik(probe);
          if (penalty_.lambda_xi > 0.0) val -= penalty_.lambda_xi / xi;
          return val;
        },
        state.xi);
  }
}

Vec optimize_weights(const Mat& L, Vec pi, const Vec& lambda, int max_iter, double tol) {
  const int np = static_cast<int>(L.rows());
  const int nc = static_cast<int>(L.cols());
  const Vec lm1 = lambda - Vec::Ones(nc);
  auto em_step = [&](const Vec& w) {
    Vec counts = Vec::Zero(nc);
    for (int j = 0; j < np; ++j) {
      double total = 0.0;
      for (int m = 0; m < nc; ++m) total += w(m) * L(j, m);
      if (total < kTinyDensity) continue;
      for (int m = 0; m < nc; ++m) counts(m) += w(m) * L(j, m) / total;
    }
    Vec numer = counts + lm1;
    return Vec(numer / numer.sum());
  };
  auto objective = [&](const Vec& w) {
    KahanSum obj;
    for (int j = 0; j < np; ++j) {
      double total = 0.0;
      for (int m = 0; m < nc; ++m) total += w(m) * L(j, m);
      obj.add(std::log(std::max(total, kTinyDensity)));
    }
    double val = obj.value();
    for (int m = 0; m < nc; ++m) {
      if (lm1(m) == 0.0) continue;
      if (w(m) <= 0.0) return -kInf;
      val += lm1(m) * std::log(w(m));
    }
    return val;
  };
  // Squared-extrapolation acceleration of the EM fixed point. The candidate
  // is only taken when it beats the plain double step, so the objective is
  // nondecreasing exactly as for unaccelerated EM.
  for (int iter = 0; iter < max_iter; ++iter) {
    const Vec x1 = em_step(pi);
    const Vec x2 = em_step(x1);
    const Vec r = x1 - pi;
    const Vec v = (x2 - x1) - r;
    Vec next = x2;
    const double vn = v.norm();
    if (vn > 1e-14) {
      const double alpha = std::min(-r.norm() / vn, -1.0);
      Vec cand = pi - 2.0 * alpha * r + (alpha * alpha) * v;
      bool feasible = true;
      for (int m = 0; m < nc; ++m) {
        if (cand(m) < 0.0) {
          if (cand(m) < -1e-8) feasible = false;
          cand(m) = 0.0;
        }
      }
      if (feasible && cand.sum() > 0.0) {
        cand /= cand.sum();
        cand = em_step(cand);
        if (objective(cand) >= objective(x2)) next = std::move(cand);
      }
    }
    const double delta = (next - pi).lpNorm<Eigen::Infinity>();
    pi = std::move(next);
    if (delta < tol) break;
  }
  return pi;
}

namespace {

MouthwashFit run_single_start(const MouthwashProblem& problem, const MouthwashConfig& cfg,
                              const ScaledProblem& sp, const Vec& betahat_raw,
                              const Vec& se_raw, const std::optional<MouthwashState>& init) {
  MouthwashState state = init ? *init : problem.init_state();
  if (!cfg.estimate_xi) state.xi = cfg.fixed_xi;

  MouthwashFit fit;
  double obj = problem.penalized_objective(state);
  fit.objective_trace.push_back(obj);
  const bool em_path =
      (cfg.kind == MixtureKind::kScaleNormal) && !cfg.likelihood.student_t;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    if (em_path) {
      problem.em_normal_step(state);
    } else {
      problem.coord_ascent_step(state, &fit.line_search_failed);
    }
    const double obj_new = problem.penalized_objective(state);
    fit.objective_trace.push_back(obj_new);
    if (std::fabs(obj_new - obj) <= cfg.rel_tol * (std::fabs(obj) + 1.0)) {
      fit.converged = true;
      obj = obj_new;
      break;
    }
    obj = obj_new;
  }

  {
    // Final polish of the convex weights subproblem at the fitted (z, xi);
    // coordinate ascent, so the objective cannot decrease.
    const Mat L = problem.component_likelihoods(problem.offset(state.z), state.xi);
    state.pi = optimize_weights(L, state.pi, problem.penalty().lambda, 500, 1e-13);
    fit.objective_trace.push_back(problem.penalized_objective(state));
  }
  fit.g_hat = problem.grid();
  fit.g_hat.pi = state.pi;
  fit.z_hat = state.z;
  fit.xi_hat = state.xi;
  fit.responsibilities = problem.responsibilities(state);
  fit.bhat_w = sp.bhat;
  fit.shat_w = sp.shat;
  fit.offset_w = problem.offset(state.z);
  fit.scale = sp.scale;
  fit.betahat_raw = betahat_raw;
  fit.se_raw = se_raw;
  fit.likelihood = cfg.likelihood;
  return fit;
}

// The objective is not convex once z (and xi) enter; optional seeded
// restarts perturb the initialization and keep the best final objective.
MouthwashFit run_fit(const MouthwashProblem& problem, const MouthwashConfig& cfg,
                     const ScaledProblem& sp, const Vec& betahat_raw, const Vec& se_raw) {
  MouthwashFit best =
      run_single_start(problem, cfg, sp, betahat_raw, se_raw, std::nullopt);
  for (int start = 1; start < cfg.n_starts; ++start) {
    Rng rng = Rng::stream(cfg.seed, {kTagRestart, static_cast<std::uint64_t>(start)});
    MouthwashState init = problem.init_state();
    for (Eigen::Index i = 0; i < init.z.size(); ++i) {
      init.z(i) *= 1.0 + 0.5 * (rng.uniform() - 0.5);
      init.z(i) += 0.1 * rng.normal();
    }
    if (cfg.estimate_xi) init.xi = std::exp(0.5 * rng.normal());
    MouthwashFit cand = run_single_start(problem, cfg, sp, betahat_raw, se_raw, init);
    if (cand.objective_trace.back() > best.objective_trace.back()) best = std::move(cand);
  }
  return best;
}

MouthwashFit fit_subsampled(const ScaledProblem& sp, const UnimodalMixture& grid,
                            const PenaltySpec& penalty, const MouthwashConfig& cfg,
                            const Vec& betahat_raw, const Vec& se_raw) {
  const int np = static_cast<int>(sp.bhat.size());
  const int nq = static_cast<int>(sp.alpha.rows());
  const int s = *cfg.subsample;
  if (s < 10 * nq) {
    throw SubsampleTooSmall("subsample size " + std::to_string(s) + " < 10 q = " +
                            std::to_string(10 * nq));
  }
  if (s > np) throw ConfigError("subsample size exceeds the number of genes");

  Rng rng = Rng::stream(cfg.seed, {kTagSubsample});
  const auto idx = rng.sample_without_replacement(static_cast<std::size_t>(np),
                                                  static_cast<std::size_t>(s));
  Vec bhat_s(s), shat_s(s);
  Mat alpha_s(nq, s);
  for (int i = 0; i < s; ++i) {
    bhat_s(i) = sp.bhat(static_cast<Eigen::Index>(idx[i]));
    shat_s(i) = sp.shat(static_cast<Eigen::Index>(idx[i]));
    if (nq > 0) alpha_s.col(i) = sp.alpha.col(static_cast<Eigen::Index>(idx[i]));
  }
  // First pass: full solve on the subset, with the grid from all genes.
  MouthwashProblem sub_problem(bhat_s, shat_s, alpha_s, grid, penalty, cfg.likelihood,
                               cfg.estimate_xi, cfg.threads);
  ScaledProblem sp_sub{bhat_s, shat_s, alpha_s, Vec::Ones(s)};
  MouthwashFit sub_fit = run_fit(sub_problem, cfg, sp_sub, bhat_s, shat_s);

  // Second pass: fix (z, xi), re-solve the convex weights problem over all p.
  MouthwashProblem full_problem(sp.bhat, sp.shat, sp.alpha, grid, penalty, cfg.likelihood,
                                false, cfg.threads);
  MouthwashState state;
  state.z = sub_fit.z_hat;
  state.xi = sub_fit.xi_hat;
  const Mat L = full_problem.component_likelihoods(full_problem.offset(state.z), state.xi);
  state.pi = optimize_weights(L, sub_fit.g_hat.pi, penalty.lambda, 1000, 1e-14);

  MouthwashFit fit;
  fit.g_hat = grid;
  fit.g_hat.pi = state.pi;
  fit.z_hat = state.z;
  fit.xi_hat = state.xi;
  fit.objective_trace = sub_fit.objective_trace;
  fit.objective_trace.push_back(full_problem.penalized_objective(state));
  fit.responsibilities = full_problem.responsibilities(state);
  fit.converged = sub_fit.converged;
  fit.line_search_failed = sub_fit.line_search_failed;
  fit.bhat_w = sp.bhat;
  fit.shat_w = sp.shat;
  fit.offset_w = full_problem.offset(state.z);
  fit.scale = sp.scale;
  fit.betahat_raw = betahat_raw;
  fit.se_raw = se_raw;
  fit.likelihood = cfg.likelihood;
  return fit;
}

}  // namespace

MouthwashFit fit_mouthwash_summary(const Vec& bhat, const Vec& se, const Mat& alpha,
                                   const MouthwashConfig& cfg) {
  cfg.validate();
  const ScaledProblem sp =
      scale_by_se(bhat, se, alpha, cfg.gamma, cfg.estimate_xi, cfg.lambda_xi);
  const UnimodalMixture grid =
      cfg.grid ? *cfg.grid : default_grid(sp.bhat, sp.shat, cfg.kind);
  const PenaltySpec penalty = PenaltySpec::defaults(grid.M(), cfg.lambda0, cfg.lambda_xi);
  if (cfg.subsample) {
    return fit_subsampled(sp, grid, penalty, cfg, bhat, se);
  }
  MouthwashProblem problem(sp.bhat, sp.shat, sp.alpha, grid, penalty, cfg.likelihood,
                           cfg.estimate_xi, cfg.threads);
  return run_fit(problem, cfg, sp, bhat, se);
}

MouthwashFit fit_mouthwash(const RotatedModel& rm, const FactorEstimate& fa,
                           const MouthwashConfig& cfg) {
  const Vec s2 = ols_standard_errors(rm, fa.sigma2);
  const Vec se = s2.array().sqrt();
  const Mat alpha = fa.alpha / rm.r22;
  return fit_mouthwash_summary(rm.betahat, se, alpha, cfg);
}

}  // namespace unwash
