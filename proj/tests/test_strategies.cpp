#include <gtest/gtest.h>

#include <set>

#include "albench/registry.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace albench;
using albench::fixtures::random_context;

namespace {

StrategyContext context_from(const std::vector<std::vector<double>>& labeled, const Labels& y, const std::vector<std::vector<double>>& unlabeled,
                             Rng& rng) {
  StrategyContext c;
  const auto d = static_cast<Eigen::Index>(labeled.empty() ? unlabeled[0].size() : labeled[0].size());
  c.X_l.resize(static_cast<Eigen::Index>(labeled.size()), d);
  c.X_u.resize(static_cast<Eigen::Index>(unlabeled.size()), d);
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) c.X_l(static_cast<Eigen::Index>(i), j) = labeled[i][static_cast<std::size_t>(j)];
    c.l_index.push_back(i);
  }
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) c.X_u(static_cast<Eigen::Index>(i), j) = unlabeled[i][static_cast<std::size_t>(j)];
    c.u_index.push_back(labeled.size() + i);
  }
  c.y_l = y;
  c.query_model = c.task_model = LearnerSpec::svm_rbf();
  c.rng = &rng;
  return c;
}

}  // namespace

TEST(Uncertainty, ScoreExamples) {
  EXPECT_DOUBLE_EQ(uncertainty(0.5, UncertaintyMeasure::MARGIN), 0.0);
  EXPECT_NEAR(uncertainty(0.5, UncertaintyMeasure::ENTROPY), std::log(2.0), 1e-15);
  EXPECT_NEAR(uncertainty(0.9, UncertaintyMeasure::MARGIN), -0.8, 1e-15);
  EXPECT_NEAR(uncertainty(0.9, UncertaintyMeasure::ENTROPY), -(0.9 * std::log(0.9) + 0.1 * std::log(0.1)), 1e-15);
  EXPECT_NEAR(uncertainty(0.9, UncertaintyMeasure::ENTROPY), 0.3251, 5e-5);
  EXPECT_DOUBLE_EQ(uncertainty(0.3, UncertaintyMeasure::LEAST_CONFIDENCE), -0.7);
  Vector p(2);
  p << 0.9, 0.55;
  EXPECT_EQ(argmax_first(uncertainty_scores(p, UncertaintyMeasure::MARGIN)), 1u);
}

TEST(Uncertainty, MeasuresShareArgmax) {
  Rng rng(3);
  for (int t = 0; t < 2000; ++t) {
    Vector p(1 + static_cast<Eigen::Index>(uniform_index(rng, 30)));
    for (auto& v : p) v = uniform_real(rng);
    auto a = argmax_first(uncertainty_scores(p, UncertaintyMeasure::MARGIN));
    EXPECT_EQ(a, argmax_first(uncertainty_scores(p, UncertaintyMeasure::ENTROPY)));
    EXPECT_EQ(a, argmax_first(uncertainty_scores(p, UncertaintyMeasure::LEAST_CONFIDENCE)));
  }
}

TEST(Uniform, SingleCandidateAndDeterminism) {
  Rng rng(1);
  auto c = random_context(4, 1, 2, rng);
  EXPECT_EQ(select_uniform(c), c.u_index[0]);
  auto c2 = random_context(4, 10, 2, rng);
  Rng a(9), b(9);
  for (int i = 0; i < 50; ++i) {
    c2.rng = &a;
    auto x = select_uniform(c2);
    c2.rng = &b;
    EXPECT_EQ(x, select_uniform(c2));
  }
}

TEST(Uniform, ChiSquareOverTenCandidates) {
  Rng rng(5);
  auto c = random_context(4, 10, 2, rng);
  std::vector<int> counts(10, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[select_uniform(c) - 4];
  double chi2 = 0;
  for (int k : counts) chi2 += (k - draws / 10.0) * (k - draws / 10.0) / (draws / 10.0);
  EXPECT_LT(chi2, 27.877);  // 0.999 quantile, 9 df
}

TEST(Us, PicksPointNearBoundary) {
  Rng rng(1);
  auto c = context_from({{-2}, {-1}, {1}, {2}}, {-1, -1, 1, 1}, {{1.8}, {0.1}, {-1.5}}, rng);
  c.query_model = LearnerSpec::lr(1.0);
  EXPECT_EQ(select_us(c, UncertaintyMeasure::MARGIN), 5u);
  EXPECT_EQ(select_us(c, UncertaintyMeasure::ENTROPY), 5u);
}

TEST(Qbc, VoteEntropy) {
  std::vector<Labels> votes = {{1, 1, 1}, {1, -1, 1}, {1, -1, -1}, {1, 1, -1}};
  Vector s = vote_entropy(votes);
  EXPECT_DOUBLE_EQ(s[0], 0.0);
  EXPECT_NEAR(s[1], std::log(2.0), 1e-15);
  EXPECT_NEAR(s[2], std::log(2.0), 1e-15);
}

TEST(Qbc, IdenticalCommitteeFallsToLowestIndex) {
  Rng rng(2);
  auto c = random_context(10, 7, 3, rng);
  std::vector<LearnerSpec> same(3, LearnerSpec::lr(1.0));
  EXPECT_EQ(select_qbc(c, same), c.u_index[0]);
}

TEST(Qbc, TooFewMembersFallsBackToUniform) {
  Rng rng(2);
  auto c = random_context(10, 7, 3, rng);
  std::vector<LearnerSpec> one = {LearnerSpec::lr(1.0)};
  Rng a(4);
  c.rng = &a;
  auto got = select_qbc(c, one);
  Rng b(4);
  c.rng = &b;
  EXPECT_EQ(got, select_uniform(c));
}

// Exhaustive expected-error evaluation with no subsampling.
TEST(Eer, MatchesBruteForce) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    auto c = random_context(6, 2 + static_cast<std::size_t>(t % 7), 2, rng);
    c.query_model = LearnerSpec::lr(1.0);
    EXPECT_EQ(select_eer(c), oracle::eer(c)) << "instance " << t;
  }
}

TEST(Eer, SingleCandidate) {
  Rng rng(1);
  auto c = random_context(6, 1, 2, rng);
  EXPECT_EQ(select_eer(c), c.u_index[0]);
}

TEST(Coreset, FarthestPointForced) {
  Rng rng(1);
  auto c = context_from({{0}}, {1}, {{1}, {10}, {0}}, rng);
  EXPECT_EQ(select_coreset(c), 2u);
}

TEST(Coreset, MatchesBruteForceMaxMin) {
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    auto c = random_context(1 + static_cast<std::size_t>(t % 4), 2 + static_cast<std::size_t>(t % 10), 3, rng);
    EXPECT_EQ(select_coreset(c), oracle::coreset(c));
  }
}

TEST(Coreset, NeverPicksDuplicateOfLabeled) {
  Rng rng(1);
  auto c = context_from({{0, 0}, {3, 3}}, {1, -1}, {{0, 0}, {3, 3}, {0.1, 0}}, rng);
  EXPECT_EQ(select_coreset(c), 4u);
}

TEST(Graph, ClusterBeatsOutlier) {
  Rng rng(4);
  std::normal_distribution<double> N(0, 0.1);
  std::vector<std::vector<double>> u;
  for (int i = 0; i < 20; ++i) u.push_back({N(rng), N(rng)});
  u.insert(u.begin(), std::vector<double>{50.0, 50.0});
  auto c = context_from({{0, 1}, {1, 0}}, {1, -1}, u, rng);
  GraphDensityStrategy g;
  auto first = g.select(c);
  EXPECT_NE(first, c.u_index[0]);
  auto dens = build_density_graph(c.X_u, 0.5).density;
  EXPECT_EQ(first, c.u_index[argmax_first(dens)]);
}

TEST(Graph, TrivialCases) {
  Rng rng(1);
  auto one = context_from({{0}}, {1}, {{5}}, rng);
  GraphDensityStrategy g;
  EXPECT_EQ(g.select(one), 1u);
  auto two = context_from({{0}}, {1}, {{-1}, {1}}, rng);
  GraphDensityStrategy h;
  EXPECT_EQ(h.select(two), 1u);
}

TEST(Graph, StatefulAcrossRoundsAndNeverRepeats) {
  Rng rng(2);
  auto c = random_context(4, 15, 2, rng);
  GraphDensityStrategy g;
  std::set<std::size_t> seen;
  while (!c.u_index.empty()) {
    auto pick = g.select(c);
    auto it = std::find(c.u_index.begin(), c.u_index.end(), pick);
    ASSERT_NE(it, c.u_index.end());
    EXPECT_TRUE(seen.insert(pick).second);
    auto pos = static_cast<std::size_t>(it - c.u_index.begin());
    IndexList keep;
    for (std::size_t i = 0; i < c.u_index.size(); ++i)
      if (i != pos) keep.push_back(i);
    c.X_u = select_rows(c.X_u, keep);
    c.u_index.erase(it);
  }
}

TEST(Dwus, ConstantFactorsReduceToComponents) {
  Vector p(4), flat = Vector::Ones(4), dens(4);
  p << 0.9, 0.45, 0.2, 0.6;
  dens << 0.1, 0.2, 0.9, 0.3;
  EXPECT_EQ(argmax_first(dwus_scores(p, flat)), argmax_first(uncertainty_scores(p, UncertaintyMeasure::MARGIN)));
  EXPECT_EQ(argmax_first(dwus_scores(Vector::Constant(4, 0.5), dens)), 2u);
  // Dense but certain vs sparse but uncertain: 0.2*0.2 = 0.04 vs 0.9*0.02 = 0.018.
  Vector p2(2), d2(2);
  p2 << 0.9, 0.5;
  d2 << 0.2, 0.02;
  EXPECT_EQ(argmax_first(dwus_scores(p2, d2)), 0u);
}

TEST(Dwus, SelectionMatchesProduct) {
  Rng rng(6);
  auto c = random_context(8, 9, 2, rng);
  TrainedModel m = train(c.query_model, c.X_l, c.y_l);
  Vector p = m.proba_pos(c.X_u);
  Vector dens = kernel_density(c.X_u);
  Vector s(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) s[i] = (1 - std::abs(p[i] - (1 - p[i]))) * dens[i];
  EXPECT_EQ(select_dwus(c), c.u_index[argmax_first(s)]);
}

TEST(Mcm, FallbackAndSingleInMargin) {
  Rng rng(1);
  auto c = context_from({{-3}, {-2}, {2}, {3}}, {-1, -1, 1, 1}, {{-40}, {25}, {-30}}, rng);
  c.query_model = LearnerSpec::svm_linear();
  TrainedModel m = train(c.query_model, c.X_l, c.y_l);
  Vector f = m.decision(c.X_u);
  ASSERT_GT(f.cwiseAbs().minCoeff(), 1.0);
  EXPECT_EQ(select_mcm(c), 5u);

  auto c2 = context_from({{-3}, {-2}, {2}, {3}}, {-1, -1, 1, 1}, {{-40}, {0.05}, {30}}, rng);
  c2.query_model = LearnerSpec::svm_linear();
  EXPECT_EQ(select_mcm(c2), 5u);
}

TEST(Mcm, ReturnsPointClosestToItsCenter) {
  Rng gen(3);
  std::normal_distribution<double> N(0, 0.05);
  std::vector<std::vector<double>> u;
  for (int i = 0; i < 6; ++i) u.push_back({N(gen), 1 + N(gen)});
  for (int i = 0; i < 6; ++i) u.push_back({N(gen), -1 + N(gen)});
  Rng rng(10);
  auto c = context_from({{-2, 0}, {-2, 1}, {2, 0}, {2, -1}}, {-1, -1, 1, 1}, u, rng);
  c.query_model = LearnerSpec::svm_linear();
  Rng copy = rng;
  auto pick = select_mcm(c, 2);

  TrainedModel m = train(c.query_model, c.X_l, c.y_l);
  Vector f = m.decision(c.X_u);
  IndexList margin;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    if (std::abs(f[i]) < 1) margin.push_back(static_cast<std::size_t>(i));
  ASSERT_GE(margin.size(), 2u);
  Matrix M = select_rows(c.X_u, margin);
  auto km = kmeans(M, 2, copy);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < margin.size(); ++k)
    best = std::min(best, (M.row(static_cast<Eigen::Index>(k)) - km.centers.row(static_cast<Eigen::Index>(km.assignment[k]))).squaredNorm());
  auto pos = std::find(margin.begin(), margin.end(), pick - 4) - margin.begin();
  ASSERT_LT(static_cast<std::size_t>(pos), margin.size());
  auto k = static_cast<std::size_t>(pos);
  EXPECT_NEAR((M.row(static_cast<Eigen::Index>(k)) - km.centers.row(static_cast<Eigen::Index>(km.assignment[k]))).squaredNorm(), best, 1e-12);
}

TEST(InfoDiv, QuotaExamples) {
  EXPECT_EQ(infodiv_quotas({6, 3}, 3), (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(infodiv_quotas({6, 3}, 1), (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(infodiv_quotas({5, 5}, 10), (std::vector<std::size_t>{5, 5}));
}

TEST(InfoDiv, SingleQueryEqualsUncertaintySampling) {
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    auto c = random_context(6 + static_cast<std::size_t>(t % 5), 3 + static_cast<std::size_t>(t % 25), 2 + static_cast<std::size_t>(t % 3), rng);
    if (t % 2) c.query_model = LearnerSpec::lr(0.1);
    auto id = select_infodiv(c, 1);
    ASSERT_EQ(id.size(), 1u);
    EXPECT_EQ(id[0], select_us(c, UncertaintyMeasure::MARGIN));
  }
}

TEST(InfoDiv, FullBatchReturnsWholePool) {
  Rng rng(2);
  auto c = random_context(6, 12, 2, rng);
  auto all = select_infodiv(c, 12);
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, c.u_index);
}

TEST(Stabilize, IdentityAndShift) {
  auto s = stabilize_kernel(Matrix::Identity(4, 4));
  EXPECT_NEAR((s.K - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.0, 1e-14);
  Matrix A(2, 2);
  A << 2, 1, 1, 2;
  Eigen::SelfAdjointEigenSolver<Matrix> before(A);
  auto t = stabilize_kernel(A);
  Eigen::SelfAdjointEigenSolver<Matrix> after(t.K);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(after.eigenvalues()[i], before.eigenvalues()[i] + t.epsilon, 1e-14);
}

TEST(Stabilize, DuplicatedRowsBecomePositiveDefinite) {
  Rng rng(4);
  std::normal_distribution<double> N;
  Matrix X(8, 3);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = X(i + 4, j) = N(rng);
  Matrix K = rbf_gram(X, 1.0 / 3);
  Eigen::SelfAdjointEigenSolver<Matrix> raw(K);
  EXPECT_LT(raw.eigenvalues().minCoeff(), 1e-12);
  auto s = stabilize_kernel(K);
  Eigen::SelfAdjointEigenSolver<Matrix> fixed(s.K);
  EXPECT_GT(fixed.eigenvalues().minCoeff(), 0.0);
  EXPECT_LE(s.epsilon, 1e-6);
}

TEST(Stabilize, IndefiniteBeyondCapThrows) {
  Matrix A(2, 2);
  A << 0, 1, 1, 0;
  EXPECT_THROW(stabilize_kernel(A), NumericError);
}

TEST(BoxProjection, Feasible) {
  Rng rng(3);
  std::normal_distribution<double> N(0, 2);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(uniform_index(rng, 10));
    Vector v(n), e(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v[i] = N(rng);
      e[i] = 0.2 + uniform_real(rng) * 2;
    }
    double b = uniform_real(rng) * e.sum();
    Vector a = project_box_hyperplane(v, e, b);
    EXPECT_NEAR(e.dot(a), b, 1e-9);
    EXPECT_GE(a.minCoeff(), 0.0);
    EXPECT_LE(a.maxCoeff(), 1.0);
    // Optimality against random feasible points.
    for (int k = 0; k < 5; ++k) {
      Vector w(n);
      for (auto& x : w) x = N(rng);
      Vector z = project_box_hyperplane(w, e, b);
      EXPECT_LE((a - v).squaredNorm(), (z - v).squaredNorm() + 1e-9);
    }
  }
}

TEST(Bmdr, ConstraintHolds) {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    auto c = random_context(6, 3 + static_cast<std::size_t>(t % 8), 2, rng);
    auto r = select_spal_detail(c, 1000, 1, 1, Vector::Ones(c.X_u.rows()));
    EXPECT_NEAR(r.alpha.sum(), 1.0, 1e-6);
    EXPECT_GE(r.alpha.minCoeff(), 0.0);
    EXPECT_LE(r.alpha.maxCoeff(), 1.0);
  }
}

TEST(Bmdr, DiscriminativeOnlyPicksSmallestCost) {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    auto c = random_context(6, 3 + static_cast<std::size_t>(t % 6), 2, rng);
    auto p = build_bmdr_problem(c, 0.0, 1.0, 1.0);
    auto r = select_spal_detail(c, 0.0, 1.0, 1.0, Vector::Ones(c.X_u.rows()), BmdrExtraction::ARGMAX);
    EXPECT_EQ(r.index, c.u_index[argmin_first(p.g)]);
  }
}

TEST(Bmdr, MatchesBruteForceOverVertices) {
  Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    auto c = random_context(4 + static_cast<std::size_t>(t % 5), 2 + static_cast<std::size_t>(t % 5), 2 + static_cast<std::size_t>(t % 2), rng);
    EXPECT_EQ(select_bmdr(c), oracle::bmdr_vertex(c, 1000, 1, 1, Vector::Ones(c.X_u.rows()))) << "instance " << t;
  }
}

TEST(Spal, UnitWeightsEqualBmdr) {
  Rng rng(17);
  for (int t = 0; t < 30; ++t) {
    auto c = random_context(6, 2 + static_cast<std::size_t>(t % 10), 2, rng);
    EXPECT_EQ(select_spal(c, 1000, 1, 1, Vector::Ones(c.X_u.rows())), select_bmdr(c));
  }
}

TEST(Spal, ScaledWeightsMatchBruteForce) {
  Rng rng(19);
  for (int t = 0; t < 30; ++t) {
    auto c = random_context(6, 2 + static_cast<std::size_t>(t % 5), 2, rng);
    Vector e = Vector::Constant(c.X_u.rows(), 2.0);
    auto r = select_spal_detail(c, 1000, 1, 1, e);
    EXPECT_NEAR(e.dot(r.alpha), 1.0, 1e-6);
    EXPECT_EQ(r.index, oracle::bmdr_vertex(c, 1000, 1, 1, e));
  }
}

TEST(Albl, SingleArmTraceEqualsArm) {
  Rng r1(5), r2(5);
  auto c = random_context(6, 12, 2, r1);
  std::vector<std::unique_ptr<QueryStrategy>> arms;
  arms.push_back(std::make_unique<FunctionStrategy>(select_uniform));
  AlblStrategy albl(std::move(arms));
  Rng a(1), b(1);
  for (int i = 0; i < 20; ++i) {
    c.rng = &a;
    auto x = albl.select(c);
    c.rng = &b;
    EXPECT_EQ(x, select_uniform(c));
  }
}

TEST(Albl, ZeroRewardKeepsUniform) {
  std::vector<std::unique_ptr<QueryStrategy>> arms;
  for (int i = 0; i < 3; ++i) arms.push_back(std::make_unique<FunctionStrategy>(select_uniform));
  AlblStrategy albl(std::move(arms));
  for (int i = 0; i < 10; ++i) albl.apply_reward(0.0);
  for (double p : albl.probabilities()) EXPECT_NEAR(p, 1.0 / 3, 1e-15);
  albl.apply_reward(1.0);
  auto p = albl.probabilities();
  EXPECT_GT(p[0], p[1]);
  EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-15);
}

TEST(Albl, Deterministic) {
  auto run = [] {
    Rng data(3);
    auto c = random_context(8, 15, 2, data);
    auto s = make_strategy("albl", c.task_model);
    Rng rng(42);
    c.rng = &rng;
    std::vector<std::size_t> picks;
    for (int i = 0; i < 6; ++i) picks.push_back(s->select(c));
    return picks;
  };
  EXPECT_EQ(run(), run());
}

TEST(Registry, NamesAndUnknown) {
  EXPECT_EQ(strategy_names().size(), 14u);
  EXPECT_TRUE(is_strategy("us-nc"));
  EXPECT_FALSE(is_strategy("nope"));
  EXPECT_THROW(make_strategy("nope", LearnerSpec::svm_rbf()), UnknownStrategy);
  EXPECT_EQ(default_query_model("us-nc", LearnerSpec::svm_rbf()), LearnerSpec::lr(0.1));
  EXPECT_EQ(default_query_model("us-c", LearnerSpec::rf()), LearnerSpec::rf());
}

// Every strategy returns an index of the current unlabeled pool.
TEST(Registry, SelectionsStayInPool) {
  Rng rng(23);
  for (const auto& name : strategy_names()) {
    if (name == "bso") continue;
    auto c = random_context(8, 14, 3, rng);
    c.query_model = default_query_model(name, c.task_model);
    auto s = make_strategy(name, c.task_model);
    std::set<std::size_t> pool(c.u_index.begin(), c.u_index.end());
    for (int i = 0; i < 3; ++i) EXPECT_TRUE(pool.count(s->select(c))) << name;
  }
}
