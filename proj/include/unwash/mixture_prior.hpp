#pragma once

// The unimodal mixture prior g: a point mass at zero plus normal or
// (half-)uniform components on a scale grid, with simplex weights pi.
// Also the Dirichlet-style weight penalty and the xi penalty.

#include <limits>
#include <vector>

#include "unwash/types.hpp"

namespace unwash {

enum class MixtureKind { kScaleNormal, kSymmetricUniform, kHalfUniform };

struct MixtureComponent {
  enum class Type { kPointMass, kNormal, kUniform };
  Type type = Type::kPointMass;
  double tau = 0.0;  // normal sd (scale-normal kind)
  double a = 0.0;    // uniform endpoints, a <= 0 <= b
  double b = 0.0;

  static MixtureComponent point_mass() { return {}; }
  static MixtureComponent normal(double tau) { return {Type::kNormal, tau, 0.0, 0.0}; }
  static MixtureComponent uniform(double a, double b) { return {Type::kUniform, 0.0, a, b}; }
};

struct LikelihoodSpec {
  bool student_t = false;
  double nu = std::numeric_limits<double>::infinity();
};

struct UnimodalMixture {
  MixtureKind kind = MixtureKind::kScaleNormal;
  std::vector<MixtureComponent> comps;  // comps[0] is always the point mass
  Vec pi;                               // length M + 1, sums to 1

  int M() const { return static_cast<int>(comps.size()) - 1; }
  double pi0() const { return pi(0); }
  // Variance of g (mixture second moment about the zero mode).
  double variance() const;
  void check() const;  // throws on malformed mixtures
};

struct PenaltySpec {
  Vec lambda;             // length M + 1 Dirichlet-style exponents
  double lambda_xi = 0.0;

  static PenaltySpec defaults(int M, double lambda0 = 10.0, double lambda_xi = 0.0);
};

// Geometric grid of component scales from min(shat)/10 up to
// 2 sqrt(max(bhat^2 - shat^2)+), step sqrt(2), top capped at the endpoint.
// No-signal inputs fall back to a point mass plus one component at
// 2 max(shat). pi starts with pi0 = 1 - 1/(10 M), remainder uniform.
UnimodalMixture default_grid(const Vec& bhat, const Vec& shat, MixtureKind kind);

// Density at x of component convolved with the likelihood noise centered at
// `center` with variance s2. The point mass contributes the likelihood
// density at x - center.
double component_convolved_density(const MixtureComponent& comp, double x, double center,
                                   double s2, const LikelihoodSpec& lik);

struct ConvolvedDensity {
  Vec per_component;
  double total = 0.0;
};

ConvolvedDensity convolved_density(const UnimodalMixture& mix, double x, double center, double s2,
                                   const LikelihoodSpec& lik);

// loglik + sum_m (lambda_m - 1) log pi_m - lambda_xi / xi. Returns -inf for
// boundary pi with lambda_m > 1.
double penalized_log_objective(const UnimodalMixture& mix, const PenaltySpec& penalty,
                               double loglik, double xi);

// Working-scale transform for effects scaled by s^gamma. gamma = 0 is the
// identity; gamma = 1 divides (bhat, alpha columns) by s and sets unit
// standard errors, so the model noise variance becomes xi itself.
struct ScaledProblem {
  Vec bhat;
  Vec shat;   // working-scale standard errors
  Mat alpha;  // q x p, columns scaled
  Vec scale;  // s^gamma, maps posterior moments back to the raw scale
};

ScaledProblem scale_by_se(const Vec& bhat, const Vec& shat, const Mat& alpha, int gamma,
                          bool xi_free, double lambda_xi);

}  // namespace unwash
