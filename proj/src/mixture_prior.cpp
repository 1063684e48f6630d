#include "unwash/mixture_prior.hpp"

#include <cmath>
#include <string>

#include "unwash/errors.hpp"
#include "unwash/prob.hpp"

namespace unwash {

double UnimodalMixture::variance() const {
  double v = 0.0;
  for (std::size_t m = 1; m < comps.size(); ++m) {
    const auto& c = comps[m];
    double second_moment = 0.0;
    if (c.type == MixtureComponent::Type::kNormal) {
      second_moment = c.tau * c.tau;
    } else if (c.type == MixtureComponent::Type::kUniform) {
      second_moment = (c.a * c.a + c.a * c.b + c.b * c.b) / 3.0;
    }
    v += pi(static_cast<Eigen::Index>(m)) * second_moment;
  }
  return v;
}

void UnimodalMixture::check() const {
  if (comps.empty() || comps[0].type != MixtureComponent::Type::kPointMass) {
    throw ConfigError("mixture must start with the point mass component");
  }
  if (pi.size() != static_cast<Eigen::Index>(comps.size())) {
    throw ConfigError("pi length does not match component count");
  }
  if ((pi.array() < -1e-12).any() || std::fabs(pi.sum() - 1.0) > 1e-12) {
    throw ConfigError("pi must be a simplex vector (sum 1, nonnegative)");
  }
  for (std::size_t m = 1; m < comps.size(); ++m) {
    const auto& c = comps[m];
    if (c.type == MixtureComponent::Type::kPointMass) {
      throw ConfigError("only component 0 may be a point mass");
    }
    if (c.type == MixtureComponent::Type::kNormal) {
      if (!(c.tau >= 0.0)) throw ConfigError("normal component needs tau >= 0");
    } else {
      if (!(c.a <= 0.0 && 0.0 <= c.b)) {
        throw ConfigError("uniform component must contain 0 (mode at zero)");
      }
      if (c.a == c.b) throw DegenerateComponent("uniform component with zero width");
    }
  }
}

PenaltySpec PenaltySpec::defaults(int M, double lambda0, double lambda_xi) {
  PenaltySpec p;
  p.lambda = Vec::Ones(M + 1);
  p.lambda(0) = lambda0;
  p.lambda_xi = lambda_xi;
  return p;
}

namespace {

std::vector<double> grid_scales(const Vec& bhat, const Vec& shat) {
  const double smin = shat.minCoeff() / 10.0;
  const double gap2 = (bhat.array().square() - shat.array().square()).maxCoeff();
  double smax;
  if (gap2 > 0.0) {
    smax = 2.0 * std::sqrt(gap2);
  } else {
    smax = 2.0 * shat.maxCoeff();  // no-signal fallback: single spread component
    return {smax};
  }
  std::vector<double> scales;
  const double step = std::sqrt(2.0);
  for (double s = smin; s < smax * (1.0 - 1e-12); s *= step) scales.push_back(s);
  scales.push_back(smax);
  return scales;
}

}  // namespace

UnimodalMixture default_grid(const Vec& bhat, const Vec& shat, MixtureKind kind) {
  if (bhat.size() != shat.size() || bhat.size() == 0) {
    throw DimensionMismatch("default_grid: bhat and shat must have equal, nonzero length");
  }
  if ((shat.array() <= 0.0).any()) throw NonPositiveVariance("default_grid: shat <= 0");
  const std::vector<double> scales = grid_scales(bhat, shat);
  UnimodalMixture mix;
  mix.kind = kind;
  mix.comps.push_back(MixtureComponent::point_mass());
  for (double s : scales) {
    switch (kind) {
      case MixtureKind::kScaleNormal:
        mix.comps.push_back(MixtureComponent::normal(s));
        break;
      case MixtureKind::kSymmetricUniform:
        mix.comps.push_back(MixtureComponent::uniform(-s, s));
        break;
      case MixtureKind::kHalfUniform:
        mix.comps.push_back(MixtureComponent::uniform(-s, 0.0));
        mix.comps.push_back(MixtureComponent::uniform(0.0, s));
        break;
    }
  }
  const int M = mix.M();
  mix.pi = Vec::Zero(M + 1);
  mix.pi(0) = 1.0 - 1.0 / (10.0 * M);
  for (int m = 1; m <= M; ++m) mix.pi(m) = (1.0 - mix.pi(0)) / M;
  mix.check();
  return mix;
}

double component_convolved_density(const MixtureComponent& comp, double x, double center,
                                   double s2, const LikelihoodSpec& lik) {
  if (!(s2 > 0.0)) throw NonPositiveVariance("convolved_density: s2 <= 0");
  const double r = x - center;
  if (comp.type == MixtureComponent::Type::kPointMass) {
    return lik.student_t ? t_pdf(r, 0.0, s2, lik.nu) : norm_pdf(r, 0.0, s2);
  }
  if (comp.type == MixtureComponent::Type::kNormal) {
    if (lik.student_t) {
      throw ConfigError("normal mixture components are not supported with a t likelihood");
    }
    return norm_pdf(r, 0.0, s2 + comp.tau * comp.tau);
  }
  if (comp.a == comp.b) throw DegenerateComponent("uniform component with zero width");
  const double sd = std::sqrt(s2);
  const double hi = (r - comp.a) / sd;
  const double lo = (r - comp.b) / sd;
  const double mass = lik.student_t ? t_cdf_diff(hi, lo, lik.nu) : norm_cdf_diff(hi, lo);
  return mass / (comp.b - comp.a);
}

ConvolvedDensity convolved_density(const UnimodalMixture& mix, double x, double center, double s2,
                                   const LikelihoodSpec& lik) {
  ConvolvedDensity out;
  const int M = mix.M();
  out.per_component.resize(M + 1);
  for (int m = 0; m <= M; ++m) {
    out.per_component(m) = component_convolved_density(mix.comps[m], x, center, s2, lik);
    out.total += mix.pi(m) * out.per_component(m);
  }
  return out;
}

double penalized_log_objective(const UnimodalMixture& mix, const PenaltySpec& penalty,
                               double loglik, double xi) {
  if (penalty.lambda.size() != mix.pi.size()) {
    throw DimensionMismatch("penalty lambda length does not match mixture size");
  }
  double obj = loglik;
  for (Eigen::Index m = 0; m < mix.pi.size(); ++m) {
    const double lm = penalty.lambda(m);
    if (lm == 1.0) continue;
    if (mix.pi(m) <= 0.0) return -kInf;
    obj += (lm - 1.0) * std::log(mix.pi(m));
  }
  if (penalty.lambda_xi > 0.0) obj -= penalty.lambda_xi / xi;
  return obj;
}

ScaledProblem scale_by_se(const Vec& bhat, const Vec& shat, const Mat& alpha, int gamma,
                          bool xi_free, double lambda_xi) {
  if (gamma != 0 && gamma != 1) throw ConfigError("gamma must be 0 or 1");
  if (gamma == 1 && xi_free && lambda_xi <= 0.0) {
    throw UnidentifiableConfig(
        "gamma = 1 with free xi requires lambda_xi > 0 (g and xi are confounded otherwise)");
  }
  ScaledProblem sp;
  if (gamma == 0) {
    sp.bhat = bhat;
    sp.shat = shat;
    sp.alpha = alpha;
    sp.scale = Vec::Ones(bhat.size());
    return sp;
  }
  sp.scale = shat;
  sp.bhat = bhat.array() / shat.array();
  sp.shat = Vec::Ones(bhat.size());
  sp.alpha = alpha;
  for (Eigen::Index j = 0; j < sp.alpha.cols(); ++j) sp.alpha.col(j) /= shat(j);
  return sp;
}

}  // namespace unwash
