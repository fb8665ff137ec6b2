#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "albench/random.hpp"
#include "albench/stats.hpp"
#include "oracles.hpp"

using namespace albench;
using namespace albench::stats;
using albench::oracle::chi2_cdf_quad;
using albench::oracle::t_cdf_quad;

TEST(Distributions, ChiSquareMatchesQuadrature) {
  for (double k : {1.0, 2.0, 3.0, 4.0, 5.0, 10.0, 30.0})
    for (double x : {0.05, 0.5, 1.0, 2.0, 4.5, 7.0, 12.0, 25.0, 40.0}) {
      double q = chi2_cdf_quad(x, k);
      EXPECT_NEAR(chi2_cdf(x, k), q, 1e-6) << "k=" << k << " x=" << x;
      EXPECT_NEAR(chi2_sf(x, k), 1.0 - q, 1e-6) << "k=" << k << " x=" << x;
    }
}

TEST(Distributions, ChiSquareTwoDfClosedForm) {
  for (double x : {0.1, 1.0, 4.5, 30.0, 80.0}) EXPECT_NEAR(chi2_sf(x, 2.0) / std::exp(-x / 2.0), 1.0, 1e-10);
}

TEST(Distributions, StudentTMatchesQuadrature) {
  for (double v : {1.0, 2.0, 3.0, 5.0, 10.0, 29.0, 99.0})
    for (double t : {-4.0, -2.0, -0.7, 0.0, 0.3, 1.0, 2.0, 3.5, 6.0}) EXPECT_NEAR(t_cdf(t, v), t_cdf_quad(t, v), 1e-6) << "v=" << v << " t=" << t;
  EXPECT_NEAR(t_sf(2.0, 10.0), 1.0 - t_cdf_quad(2.0, 10.0), 1e-6);
}

TEST(Distributions, StudentTCauchyClosedForm) {
  for (double t : {-3.0, -0.5, 0.0, 1.0, 10.0}) EXPECT_NEAR(t_cdf(t, 1.0), 0.5 + std::atan(t) / std::numbers::pi, 1e-12);
}

TEST(Ranks, AverageTiesDescending) {
  auto r = descending_ranks({0.5, 0.9, 0.5, 0.1});
  EXPECT_EQ(r, (std::vector<double>{2.5, 1.0, 2.5, 4.0}));
  EXPECT_EQ(descending_ranks({0.7, 0.7}), (std::vector<double>{1.5, 1.5}));
}

TEST(Friedman, HandComputedFixture) {
  // Ranks per block: A 1,1,2,1  B 2,3,1,2  C 3,2,3,3 -> mean ranks 1.25, 2, 2.75.
  std::vector<std::vector<double>> b = {{0.9, 0.8, 0.7}, {0.9, 0.7, 0.8}, {0.8, 0.9, 0.7}, {0.9, 0.8, 0.7}};
  const double sum_sq = 1.25 * 1.25 + 2.0 * 2.0 + 2.75 * 2.75;
  const double expect = 12.0 * 4 / (3.0 * 4.0) * sum_sq - 3.0 * 4 * 4;
  auto r = friedman(b);
  EXPECT_NEAR(r.statistic, expect, 1e-12);
  EXPECT_NEAR(r.statistic, 4.5, 1e-12);
  EXPECT_NEAR(r.p, std::exp(-2.25), 1e-12);
}

TEST(Friedman, AllEqualGivesPOne) {
  auto r = friedman({{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}});
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p, 1.0);
}

TEST(Friedman, InvariantUnderMonotoneTransform) {
  Rng rng(3);
  std::normal_distribution<double> N;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::vector<double>> b(8, std::vector<double>(4)), tb = b;
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        b[i][j] = 0.7 + 0.05 * N(rng) + 0.01 * static_cast<double>(j);
        tb[i][j] = std::exp(3.0 * b[i][j]) - 1.0;
      }
    EXPECT_DOUBLE_EQ(friedman(b).statistic, friedman(tb).statistic);
  }
}

TEST(Friedman, MatchesPermutationOracle) {
  // 20 seeds x 5 strategies with a mild treatment effect.
  Rng rng(11);
  std::normal_distribution<double> N;
  std::vector<std::vector<double>> b(20, std::vector<double>(5));
  for (auto& row : b)
    for (std::size_t j = 0; j < 5; ++j) row[j] = 0.012 * static_cast<double>(j) + 0.1 * N(rng);
  const auto obs = friedman(b);
  ASSERT_GT(obs.p, 0.01);
  ASSERT_LT(obs.p, 0.9);
  EXPECT_NEAR(obs.statistic, oracle::friedman_rank_sum_stat(b), 1e-9);
  const double p_perm = oracle::friedman_permutation_p(b, 100000, rng);
  EXPECT_NEAR(obs.p, p_perm, 0.02) << "chi-square p " << obs.p << " permutation p " << p_perm;
}

TEST(PairedT, DirectFormula) {
  auto r = paired_t({1, 2, 3, 4});
  EXPECT_NEAR(r.statistic, std::sqrt(4.0) * 2.5 / 1.2909944487358056, 1e-12);
  EXPECT_NEAR(r.statistic, 3.873, 1e-3);
  // df = 3 has a closed-form CDF.
  const double t = r.statistic, s3 = std::sqrt(3.0);
  const double cdf = 0.5 + (t / (s3 * (1.0 + t * t / 3.0)) + std::atan(t / s3)) / std::numbers::pi;
  EXPECT_NEAR(r.p, 1.0 - cdf, 1e-10);
  EXPECT_FALSE(r.degenerate);
}

TEST(PairedT, ZeroAndConstantDiffs) {
  auto z = paired_t({0, 0, 0});
  EXPECT_EQ(z.statistic, 0.0);
  EXPECT_EQ(z.p, 1.0);
  auto c = paired_t({5, 5, 5, 5});
  EXPECT_TRUE(c.degenerate);
  EXPECT_LT(c.p, 1e-12);
  auto neg = paired_t({-1, -1});
  EXPECT_TRUE(neg.degenerate);
  EXPECT_EQ(neg.p, 1.0);
}

TEST(PairedT, ShiftingBothSeriesLeavesPUnchanged) {
  Rng rng(5);
  std::normal_distribution<double> N;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a(10), b(10), d1, d2;
    for (int i = 0; i < 10; ++i) {
      a[i] = 0.8 + 0.03 * N(rng);
      b[i] = 0.79 + 0.03 * N(rng);
    }
    for (int i = 0; i < 10; ++i) {
      d1.push_back(a[i] - b[i]);
      d2.push_back((a[i] + 0.125) - (b[i] + 0.125));
    }
    EXPECT_NEAR(paired_t(d1).p, paired_t(d2).p, 1e-12);
  }
}

TEST(PairedT, RejectsTooFew) { EXPECT_THROW(paired_t({1.0}), std::invalid_argument); }

TEST(Summary, TwoPointSd) {
  EXPECT_NEAR(mean({0.7, 0.9}), 0.8, 1e-15);
  EXPECT_NEAR(sample_sd({0.7, 0.9}), 0.1414213562, 1e-9);
  EXPECT_EQ(sample_sd({0.4}), 0.0);
}
