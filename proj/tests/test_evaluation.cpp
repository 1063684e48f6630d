#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "unwash/errors.hpp"
#include "unwash/evaluation.hpp"
#include "unwash/simulation.hpp"

using namespace unwash;
using testutil::random_vector;

TEST_CASE("auc basics") {
  Vec scores(6);
  std::vector<bool> is_null{false, false, false, true, true, true};
  SUBCASE("perfect separation") {
    scores << 5, 4, 3, 2, 1, 0;
    CHECK(auc(scores, is_null) == doctest::Approx(1.0));
  }
  SUBCASE("all ties") {
    scores.setConstant(2.0);
    CHECK(auc(scores, is_null) == doctest::Approx(0.5));
  }
  SUBCASE("worked 6-gene instance") {
    // Pairs: 3 beats {0,2,1}; 1 beats 0, loses to 2, ties 1; 2 beats {0,1},
    // ties 2. Total 7/9 (exhaustive enumeration below agrees).
    scores << 3, 1, 2, 0, 2, 1;
    CHECK(auc(scores, is_null) == doctest::Approx(7.0 / 9.0).epsilon(1e-15));
    CHECK(auc(scores, is_null) == oracles::pair_enum_auc(scores, is_null));
  }
  SUBCASE("single class throws") {
    scores.setZero();
    CHECK_THROWS_AS(auc(scores, std::vector<bool>(6, true)), SingleClass);
  }
}

TEST_CASE("auc equals exhaustive pair enumeration exactly") {
  Rng rng(801);
  for (int rep = 0; rep < 30; ++rep) {
    const int p = 10 + static_cast<int>(rng.next_u64() % 41);  // up to 50
    Vec scores(p);
    std::vector<bool> is_null(p);
    int nulls = 0;
    for (int j = 0; j < p; ++j) {
      scores(j) = std::floor(rng.uniform() * 8.0) / 2.0;  // force ties
      is_null[j] = rng.uniform() < 0.5;
      nulls += is_null[j];
    }
    if (nulls == 0 || nulls == p) {
      is_null[0] = !is_null[0];
    }
    CHECK(auc(scores, is_null) == oracles::pair_enum_auc(scores, is_null));
  }
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
  Rng rng(802);
  Vec scores = random_vector(rng, 60);
  std::vector<bool> is_null(60);
  for (int j = 0; j < 60; ++j) is_null[j] = j % 3 == 0;
  const double base = auc(scores, is_null);
  Vec transformed(60);
  for (int j = 0; j < 60; ++j) transformed(j) = std::exp(2.0 * scores(j)) + 5.0;
  CHECK(auc(transformed, is_null) == doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("pi0_error arithmetic and aggregation identity") {
  CHECK(pi0_error(0.9, 0.9) == std::pair<double, double>{0.0, 0.0});
  const auto [bias, sq] = pi0_error(1.0, 0.9);
  CHECK(bias == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(sq == doctest::Approx(0.01).epsilon(1e-12));
  // Mean over replicates of squared errors equals the MSE definition.
  std::vector<double> hats{0.8, 0.95, 1.0};
  double mse = 0.0;
  for (double h : hats) mse += pi0_error(h, 0.9).second;
  mse /= 3.0;
  double direct = ((0.1 * 0.1) + (0.05 * 0.05) + (0.1 * 0.1)) / 3.0;
  CHECK(mse == doctest::Approx(direct).epsilon(1e-12));
  CHECK_THROWS_AS(pi0_error(1.2, 0.5), ConfigError);
}

TEST_CASE("spearman rank correlation") {
  Vec x(5), y(5);
  x << 1, 2, 3, 4, 5;
  y << 2, 4, 6, 8, 10;
  CHECK(spearman(x, y) == doctest::Approx(1.0));
  y << 10, 8, 6, 4, 2;
  CHECK(spearman(x, y) == doctest::Approx(-1.0));
}

TEST_CASE("compare aggregates per method and condition") {
  SimulationConfig cfg;
  cfg.n = 6;
  cfg.p = 40;
  cfg.pi0 = 0.5;
  std::vector<SimulatedStudy> studies;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    cfg.seed = seed;
    studies.push_back(simulate(cfg));
  }
  Rng rng(803);
  std::vector<std::vector<MethodScores>> scores(3);
  for (int i = 0; i < 3; ++i) {
    MethodScores good{"good", random_vector(rng, 40), 0.52};
    MethodScores bad{"bad", random_vector(rng, 39), 0.9};  // wrong length
    scores[i] = {good, bad};
  }
  const auto rows = compare(studies, scores);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    if (row.method == "good") {
      CHECK(row.replicates == 3);
      CHECK(std::isfinite(row.mean_auc));
      CHECK(row.pi0_bias == doctest::Approx(0.02).epsilon(1e-9));
      CHECK(row.note.empty());
    } else {
      CHECK(std::isnan(row.mean_auc));
      CHECK_FALSE(row.note.empty());
    }
  }
}

TEST_CASE("compare with a single study and method emits one row") {
  SimulationConfig cfg;
  cfg.n = 6;
  cfg.p = 30;
  cfg.pi0 = 0.5;
  cfg.seed = 7;
  const std::vector<SimulatedStudy> studies{simulate(cfg)};
  Rng rng(804);
  const std::vector<std::vector<MethodScores>> scores{
      {MethodScores{"only", random_vector(rng, 30), std::nullopt}}};
  const auto rows = compare(studies, scores);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].method == "only");
  CHECK(std::isnan(rows[0].pi0_bias));  // no pi0 estimates supplied
}
