#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "albench/dataset.hpp"

using namespace albench;

namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_sparse_dataset(in, "t");
}

std::string data_path(const char* file) { return std::string(ALBENCH_SOURCE_DIR) + "/data/" + file; }

}  // namespace

TEST(Parse, SingleLine) {
  Dataset ds = parse("+1 1:0.5 3:-1.0\n");
  ASSERT_EQ(ds.n(), 1u);
  ASSERT_EQ(ds.d(), 3u);
  EXPECT_EQ(ds.y[0], 1);
  EXPECT_DOUBLE_EQ(ds.X(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(ds.X(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(ds.X(0, 2), -1.0);
}

TEST(Parse, CrlfAndBlankLinesAndZeroOneLabels) {
  Dataset ds = parse("1 1:2\r\n\r\n0 2:3\r\n");
  ASSERT_EQ(ds.n(), 2u);
  EXPECT_EQ(ds.y[0], 1);
  EXPECT_EQ(ds.y[1], -1);
  EXPECT_DOUBLE_EQ(ds.X(1, 1), 3.0);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse("+1 1:0.5 1:2\n"), ParseError);
  EXPECT_THROW(parse("+1 2:0.5 1:2\n"), ParseError);
  EXPECT_THROW(parse("+1 0:0.5\n"), ParseError);
  EXPECT_THROW(parse("+1 1-0.5\n"), ParseError);
  EXPECT_THROW(parse("abc 1:0.5\n"), ParseError);
  EXPECT_THROW(parse("+1 1:x\n"), ParseError);
  EXPECT_THROW(parse("1 1:1\n2 1:1\n3 1:1\n"), NotBinaryError);
  EXPECT_THROW(parse("1 1:1\n2 1:1\n"), NotBinaryError);
  try {
    parse("+1 1:1\n-1 1:1 2:z\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 2u);
    EXPECT_EQ(e.column, 10u);
  }
}

TEST(Parse, RoundTripPreservesContent) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset ds;
    ds.X = Matrix::Zero(7, 5);
    ds.y.resize(7);
    for (int i = 0; i < 7; ++i) {
      ds.y[static_cast<std::size_t>(i)] = uniform_index(rng, 2) ? 1 : -1;
      for (int j = 0; j < 5; ++j)
        if (uniform_index(rng, 3) == 0) ds.X(i, j) = uniform_real(rng) * 200 - 100;
    }
    ds.X(0, 4) = 1.0;  // pin d
    std::ostringstream out;
    write_sparse_dataset(out, ds);
    std::istringstream in(out.str());
    Dataset back = parse_sparse_dataset(in);
    ASSERT_EQ(back.n(), ds.n());
    ASSERT_EQ(back.d(), ds.d());
    EXPECT_EQ(back.y, ds.y);
    EXPECT_TRUE(back.X == ds.X);
  }
}

TEST(Parse, BundledDatasetsHaveDocumentedShapes) {
  Dataset heart = load_sparse_dataset(data_path("heart.libsvm"));
  EXPECT_EQ(heart.n(), 270u);
  EXPECT_EQ(heart.d(), 13u);
  Dataset sonar = load_sparse_dataset(data_path("sonar.libsvm"));
  EXPECT_EQ(sonar.n(), 208u);
  EXPECT_EQ(sonar.d(), 60u);
  auto entries = read_dataset_manifest(data_path("datasets.txt"));
  ASSERT_EQ(entries.size(), 3u);
  for (const auto& e : entries) EXPECT_NO_THROW(load_manifest_entry(e));
  auto bad = entries[0];
  bad.expected_n = 271;
  EXPECT_THROW(load_manifest_entry(bad), Error);
}

TEST(Standardize, Examples) {
  Matrix tr(2, 2), te(1, 2);
  tr << 0, 5, 2, 5;
  te << 4, 5;
  auto s = standardize(tr, te);
  EXPECT_DOUBLE_EQ(s.train(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(s.train(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(s.test(0, 0), 3.0);
  EXPECT_EQ(s.train(0, 1), 0.0);
  EXPECT_EQ(s.train(1, 1), 0.0);
  EXPECT_EQ(s.test(0, 1), 0.0);
}

TEST(Standardize, MomentsAndIdempotence) {
  Rng rng(11);
  Matrix tr(40, 6), te(10, 6);
  for (Eigen::Index i = 0; i < tr.size(); ++i) tr.data()[i] = uniform_real(rng) * 50 - 3;
  for (Eigen::Index i = 0; i < te.size(); ++i) te.data()[i] = uniform_real(rng);
  auto s = standardize(tr, te);
  for (Eigen::Index j = 0; j < 6; ++j) {
    EXPECT_LE(std::abs(s.train.col(j).mean()), 1e-9);
    double var = s.train.col(j).array().square().mean();
    EXPECT_NEAR(var, 1.0, 1e-9);
  }
  auto again = standardize(s.train, s.test);
  EXPECT_LE((again.train - s.train).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Split, SizesAndPartition) {
  Dataset ds;
  ds.X = Matrix::Zero(270, 1);
  ds.y.assign(270, 1);
  auto sp = split_train_test(ds, 0.4, 3);
  EXPECT_EQ(sp.test_idx.size(), 108u);
  EXPECT_EQ(sp.train_idx.size(), 162u);

  ds.X = Matrix::Zero(10, 1);
  ds.y.assign(10, 1);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto s = split_train_test(ds, 0.4, seed);
    std::set<std::size_t> all(s.train_idx.begin(), s.train_idx.end());
    for (auto i : s.test_idx) EXPECT_TRUE(all.insert(i).second);
    EXPECT_EQ(all.size(), 10u);
    EXPECT_EQ(*all.rbegin(), 9u);
    auto t = split_train_test(ds, 0.4, seed);
    EXPECT_EQ(s.train_idx, t.train_idx);
    EXPECT_EQ(s.test_idx, t.test_idx);
  }
  EXPECT_THROW(split_train_test(ds, 1.0, 0), std::invalid_argument);
}

TEST(Split, TestSizeRounding) {
  EXPECT_EQ(test_size(270, 0.4), 108u);
  EXPECT_EQ(test_size(10, 0.4), 4u);
  EXPECT_EQ(test_size(5, 0.5), 3u);  // 2.5 rounds half up
}

TEST(InitPool, SizesDeterminismAndColdStart) {
  Labels y(162);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = i % 2 ? 1 : -1;
  auto p = init_pool(y, 20, 7);
  EXPECT_EQ(p.labeled.size(), 20u);
  EXPECT_EQ(p.unlabeled.size(), 142u);
  std::vector<std::size_t> all = p.labeled;
  all.insert(all.end(), p.unlabeled.begin(), p.unlabeled.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
  auto q = init_pool(y, 20, 7);
  EXPECT_EQ(p.labeled, q.labeled);

  Labels ones(30, 1);
  EXPECT_THROW(init_pool(ones, 20, 1), ColdStart);
  EXPECT_THROW(init_pool(y, 162, 1), std::invalid_argument);
}

TEST(InitPool, DrawsAreUniform) {
  // Each position is labeled with probability m/n; chi-square over 30 cells
  // (29 dof, 0.999 quantile 58.30).
  Labels y(30);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = i % 2 ? 1 : -1;
  std::vector<double> hits(30, 0.0);
  double kept = 0;
  for (int s = 0; s < 6000; ++s) {
    try {
      for (auto i : init_pool(y, 5, static_cast<std::uint64_t>(s)).labeled) hits[i] += 1;
      kept += 1;
    } catch (const ColdStart&) {
    }
  }
  const double expected = kept * 5.0 / 30.0;
  double chi2 = 0;
  for (double h : hits) chi2 += (h - expected) * (h - expected) / expected;
  EXPECT_LT(chi2, 58.30);
}

TEST(ImbalanceRatio, Values) {
  Dataset ds;
  ds.X = Matrix::Zero(4, 1);
  ds.y = {1, -1, 1, -1};
  EXPECT_DOUBLE_EQ(imbalance_ratio(ds), 1.0);
  ds.y = {1, 1, 1, 1};
  EXPECT_THROW(imbalance_ratio(ds), NotBinaryError);
  Dataset hab = load_sparse_dataset(data_path("haberman.libsvm"));
  EXPECT_DOUBLE_EQ(imbalance_ratio(hab), 225.0 / 81.0);
  Dataset heart = load_sparse_dataset(data_path("heart.libsvm"));
  EXPECT_LT(imbalance_ratio(heart), 1.5);
}
