#pragma once

// Signal-spiking simulation: take null count data (real or synthetic),
// randomly assign two groups, and thin counts binomially to plant known
// log2-scale effects at a chosen fraction of genes.

#include <cstdint>
#include <optional>
#include <vector>

#include "unwash/types.hpp"

namespace unwash {

struct SimulationConfig {
  int n = 0;                       // even sample count
  int p = 0;                       // gene count
  double pi0 = 1.0;                // proportion of null genes
  double effect_sd = 0.8;          // sd of planted log2 effects
  int m_controls = 0;              // designated control genes (subset of nulls)
  std::uint64_t seed = 1;
  std::optional<Mat> base_counts;  // user-supplied n x p counts
  int uv_rank = 0;                 // planted unwanted-variation rank (synthetic base)
  double uv_strength = 0.8;        // strong enough that unadjusted fits misbehave

  void validate() const;
};

struct SimulatedStudy {
  Mat W;                      // thinned counts, n x p
  Mat Y;                      // log2(W + 1)
  IVec group;                 // 0/1 labels, n/2 each
  Vec effects;                // per-gene a_j (0 for nulls)
  std::vector<bool> is_null;  // length p
  std::vector<int> controls;  // indices into 0..p-1, all null
  SimulationConfig config;
};

// Per-gene Poisson rates lambda_j ~ LogNormal(log 500, 1), optionally
// perturbed by a planted rank-q' factor structure on the log scale.
Mat synthetic_base_counts(int n, int p, std::uint64_t seed, int uv_rank = 0,
                          double uv_strength = 0.0);

SimulatedStudy simulate(const SimulationConfig& cfg);

// Intercept-plus-group design for a simulated study (n x 2).
Mat design_matrix(const SimulatedStudy& study);

}  // namespace unwash
