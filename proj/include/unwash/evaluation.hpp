#pragma once

// Scoring harness: null/non-null discrimination AUC (Mann-Whitney, ties at
// one half), pi0 estimation error, rank correlation, and method-by-condition
// comparison tables.

#include <optional>
#include <string>
#include <vector>

#include "unwash/simulation.hpp"
#include "unwash/types.hpp"

namespace unwash {

// Probability that a random non-null gene outranks a random null gene;
// higher scores mean more significant.
double auc(const Vec& scores, const std::vector<bool>& is_null);

// (bias, squared error) of an estimated null proportion.
std::pair<double, double> pi0_error(double pi0_hat, double pi0_true);

// Spearman rank correlation (midranks on ties).
double spearman(const Vec& x, const Vec& y);

struct MethodScores {
  std::string method;
  Vec scores;  // per-gene significance, higher = more significant
  std::optional<double> pi0_hat;
};

struct StudyCondition {
  int n = 0;
  int p = 0;
  double pi0 = 1.0;
  int m_controls = 0;
  int uv_rank = 0;

  bool operator==(const StudyCondition&) const = default;
};

struct CompareRow {
  std::string method;
  StudyCondition condition;
  int replicates = 0;
  double mean_auc = std::numeric_limits<double>::quiet_NaN();
  double pi0_bias = std::numeric_limits<double>::quiet_NaN();
  double pi0_mse = std::numeric_limits<double>::quiet_NaN();
  std::string note;  // per-cell error note (empty when clean)
};

// per_study_scores[i] holds the scored methods for studies[i]. Cells with
// invalid scores (wrong length, non-finite) aggregate to NA with a note.
std::vector<CompareRow> compare(const std::vector<SimulatedStudy>& studies,
                                const std::vector<std::vector<MethodScores>>& per_study_scores);

void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows);

}  // namespace unwash
