#pragma once

// Per-gene posterior summaries conditional on the fitted (g, z, xi):
// lfdr, lfsr, posterior moments, adjusted effects and the lfdr-derived
// q-value analog.

#include "unwash/backwash.hpp"
#include "unwash/mouthwash.hpp"
#include "unwash/types.hpp"

namespace unwash {

struct GeneSummaries {
  Vec betahat;
  Vec sebetahat;
  Vec adjusted_betahat;  // betahat - alpha' z (raw scale)
  Vec lfdr;
  Vec lfsr;
  Vec post_mean;
  Vec post_sd;
  Vec qvalue_analog;  // running mean of sorted lfdr
};

GeneSummaries posterior_summaries(const MouthwashFit& fit, int threads = 1);
GeneSummaries posterior_summaries(const BackwashFit& fit);

double pi0(const MouthwashFit& fit);
double pi0(const BackwashFit& fit);

// Running mean of the sorted lfdr, mapped back to the input order.
Vec qvalue_from_lfdr(const Vec& lfdr);

}  // namespace unwash
