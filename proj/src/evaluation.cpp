#include "unwash/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "unwash/csv.hpp"
#include "unwash/errors.hpp"

namespace unwash {

namespace {

// Midranks (average rank on ties), 1-based.
Vec midranks(const Vec& x) {
  const Eigen::Index n = x.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return x(a) < x(b); });
  Vec ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && x(order[j + 1]) == x(order[i])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index t = i; t <= j; ++t) ranks(order[t]) = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double auc(const Vec& scores, const std::vector<bool>& is_null) {
  if (static_cast<std::size_t>(scores.size()) != is_null.size()) {
    throw DimensionMismatch("auc: scores and labels differ in length");
  }
  long n_null = 0, n_sig = 0;
  for (bool b : is_null) (b ? n_null : n_sig) += 1;
  if (n_null == 0 || n_sig == 0) throw SingleClass("auc: both classes must be nonempty");
  const Vec ranks = midranks(scores);
  double rank_sum = 0.0;
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    if (!is_null[static_cast<std::size_t>(j)]) rank_sum += ranks(j);
  }
  const double u = rank_sum - 0.5 * static_cast<double>(n_sig) * (n_sig + 1.0);
  return u / (static_cast<double>(n_sig) * static_cast<double>(n_null));
}

std::pair<double, double> pi0_error(double pi0_hat, double pi0_true) {
  if (!(pi0_hat >= 0.0 && pi0_hat <= 1.0 && pi0_true >= 0.0 && pi0_true <= 1.0)) {
    throw ConfigError("pi0_error: arguments must lie in [0, 1]");
  }
  const double bias = pi0_hat - pi0_true;
  return {bias, bias * bias};
}

double spearman(const Vec& x, const Vec& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DimensionMismatch("spearman: need two vectors of equal length >= 2");
  }
  const Vec rx = midranks(x), ry = midranks(y);
  const double mx = rx.mean(), my = ry.mean();
  const Vec dx = rx.array() - mx, dy = ry.array() - my;
  const double denom = std::sqrt(dx.squaredNorm() * dy.squaredNorm());
  if (denom == 0.0) return 0.0;
  return dx.dot(dy) / denom;
}

std::vector<CompareRow> compare(const std::vector<SimulatedStudy>& studies,
                                const std::vector<std::vector<MethodScores>>& per_study_scores) {
  if (studies.empty()) throw ConfigError("compare: need at least one study");
  if (per_study_scores.size() != studies.size()) {
    throw DimensionMismatch("compare: one score list per study required");
  }
  struct Cell {
    std::vector<double> aucs, biases, sqerrs;
    std::string note;
  };
  std::map<std::pair<std::string, std::string>, std::pair<CompareRow, Cell>> cells;

  for (std::size_t i = 0; i < studies.size(); ++i) {
    const auto& study = studies[i];
    StudyCondition cond{study.config.n, study.config.p, study.config.pi0,
                        study.config.m_controls, study.config.uv_rank};
    const std::string cond_key = std::to_string(cond.n) + "/" + std::to_string(cond.p) + "/" +
                                 format_double(cond.pi0) + "/" + std::to_string(cond.m_controls) +
                                 "/" + std::to_string(cond.uv_rank);
    for (const auto& ms : per_study_scores[i]) {
      auto& entry = cells[{ms.method, cond_key}];
      entry.first.method = ms.method;
      entry.first.condition = cond;
      auto& cell = entry.second;
      if (ms.scores.size() != study.config.p || !ms.scores.allFinite()) {
        cell.note = "invalid scores (expected " + std::to_string(study.config.p) + " finite values)";
        continue;
      }
      bool has_null = false, has_sig = false;
      for (bool b : study.is_null) (b ? has_null : has_sig) = true;
      if (has_null && has_sig) cell.aucs.push_back(auc(ms.scores, study.is_null));
      if (ms.pi0_hat) {
        const auto [bias, sq] = pi0_error(*ms.pi0_hat, study.config.pi0);
        cell.biases.push_back(bias);
        cell.sqerrs.push_back(sq);
      }
    }
  }

  std::vector<CompareRow> rows;
  for (auto& [key, entry] : cells) {
    CompareRow row = entry.first;
    const Cell& cell = entry.second;
    row.note = cell.note;
    row.replicates = static_cast<int>(std::max(cell.aucs.size(), cell.biases.size()));
    auto mean = [](const std::vector<double>& v) {
      return v.empty() ? std::numeric_limits<double>::quiet_NaN()
                       : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    };
    row.mean_auc = mean(cell.aucs);
    row.pi0_bias = mean(cell.biases);
    row.pi0_mse = mean(cell.sqerrs);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows) {
  std::ofstream out(path);
  if (!out) throw CsvError(path + ": cannot open file for writing");
  out << "method,n,p,pi0,m,uv_rank,replicates,mean_auc,pi0_bias,pi0_mse,note\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.condition.n << ',' << r.condition.p << ','
        << format_double(r.condition.pi0) << ',' << r.condition.m_controls << ','
        << r.condition.uv_rank << ',' << r.replicates << ',' << format_double(r.mean_auc) << ','
        << format_double(r.pi0_bias) << ',' << format_double(r.pi0_mse) << ',' << r.note << '\n';
  }
}

}  // namespace unwash
