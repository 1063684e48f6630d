#pragma once

#include <stdexcept>
#include <string>

namespace unwash {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define UNWASH_ERROR_TYPE(Name)       \
  class Name : public Error {         \
   public:                            \
    using Error::Error;               \
  }

UNWASH_ERROR_TYPE(DimensionMismatch);
UNWASH_ERROR_TYPE(RankDeficientDesign);
UNWASH_ERROR_TYPE(NonFiniteInput);
UNWASH_ERROR_TYPE(TooFewSamples);
UNWASH_ERROR_TYPE(ZeroContrast);
UNWASH_ERROR_TYPE(NonPositiveVariance);
UNWASH_ERROR_TYPE(QTooLarge);
UNWASH_ERROR_TYPE(SingularWeightedGram);
UNWASH_ERROR_TYPE(SingularGram);
UNWASH_ERROR_TYPE(DegenerateComponent);
UNWASH_ERROR_TYPE(UnidentifiableConfig);
UNWASH_ERROR_TYPE(ConfigError);
UNWASH_ERROR_TYPE(SingleClass);
UNWASH_ERROR_TYPE(SubsampleTooSmall);
UNWASH_ERROR_TYPE(CsvError);

#undef UNWASH_ERROR_TYPE

}  // namespace unwash
