#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "albench/model.hpp"
#include "albench/random.hpp"

namespace albench {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double p_pos = 0.0;
};

// CART classification tree, Gini criterion, grown until leaves are pure
// (min leaf size 1). `max_features` features are examined per split.
class DecisionTree {
 public:
  static DecisionTree grow(const Matrix& X, std::span<const int> y, std::vector<std::size_t> samples,
                           std::size_t max_features, Rng& rng) {
    DecisionTree tree;
    tree.nodes_.reserve(2 * samples.size());
    tree.build(X, y, samples, max_features, rng);
    return tree;
  }

  double leaf_p_pos(const Matrix& X, Eigen::Index row) const {
    int k = 0;
    while (nodes_[static_cast<std::size_t>(k)].feature >= 0) {
      const auto& nd = nodes_[static_cast<std::size_t>(k)];
      k = X(row, nd.feature) <= nd.threshold ? nd.left : nd.right;
    }
    return nodes_[static_cast<std::size_t>(k)].p_pos;
  }

  // Leaf majority; a 50/50 leaf votes +1.
  int vote(const Matrix& X, Eigen::Index row) const { return leaf_p_pos(X, row) >= 0.5 ? +1 : -1; }

  const std::vector<TreeNode>& nodes() const { return nodes_; }

 private:
  struct Cand {
    double x;
    int y;
  };

  int build(const Matrix& X, std::span<const int> y, std::vector<std::size_t>& samples, std::size_t max_features, Rng& rng) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const std::size_t m = samples.size();
    std::size_t pos = 0;
    for (auto s : samples) pos += y[s] > 0;
    nodes_[static_cast<std::size_t>(id)].p_pos = m ? static_cast<double>(pos) / static_cast<double>(m) : 0.0;
    if (pos == 0 || pos == m) return id;

    const auto d = static_cast<std::size_t>(X.cols());
    std::vector<std::size_t> features(d);
    for (std::size_t j = 0; j < d; ++j) features[j] = j;
    shuffle(features, rng);

    double best_cost = std::numeric_limits<double>::infinity();
    int best_feature = -1;
    double best_threshold = 0.0;
    std::size_t visited = 0;
    std::vector<Cand> cand(m);
    for (std::size_t fi = 0; fi < d && visited < max_features; ++fi) {
      const auto f = static_cast<Eigen::Index>(features[fi]);
      for (std::size_t k = 0; k < m; ++k) cand[k] = {X(static_cast<Eigen::Index>(samples[k]), f), y[samples[k]]};
      std::sort(cand.begin(), cand.end(), [](const Cand& a, const Cand& b) { return a.x < b.x; });
      if (cand.front().x == cand.back().x) continue;  // constant here, does not count
      ++visited;
      std::size_t lpos = 0;
      for (std::size_t k = 0; k + 1 < m; ++k) {
        lpos += cand[k].y > 0;
        if (cand[k].x == cand[k + 1].x) continue;
        const double nl = static_cast<double>(k + 1), nr = static_cast<double>(m - k - 1);
        const double pl = static_cast<double>(lpos), pr = static_cast<double>(pos - lpos);
        const double cost = 2.0 * pl * (nl - pl) / nl + 2.0 * pr * (nr - pr) / nr;
        if (cost < best_cost) {
          best_cost = cost;
          best_feature = static_cast<int>(f);
          double mid = (cand[k].x + cand[k + 1].x) / 2.0;
          best_threshold = (mid < cand[k + 1].x) ? mid : cand[k].x;
        }
      }
    }
    if (best_feature < 0) return id;  // every feature constant: impure leaf

    std::vector<std::size_t> left, right;
    for (auto s : samples) (X(static_cast<Eigen::Index>(s), best_feature) <= best_threshold ? left : right).push_back(s);
    std::vector<std::size_t>().swap(samples);
    nodes_[static_cast<std::size_t>(id)].feature = best_feature;
    nodes_[static_cast<std::size_t>(id)].threshold = best_threshold;
    int l = build(X, y, left, max_features, rng);
    nodes_[static_cast<std::size_t>(id)].left = l;
    int r = build(X, y, right, max_features, rng);
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  std::vector<TreeNode> nodes_;
};

class ForestModel final : public ModelImpl {
 public:
  explicit ForestModel(std::vector<DecisionTree> trees) : trees_(std::move(trees)) {}

  // Fraction of trees voting +1.
  Vector proba_pos(const Matrix& X) const override {
    Vector p = Vector::Zero(X.rows());
    for (const auto& t : trees_)
      for (Eigen::Index i = 0; i < X.rows(); ++i) p[i] += t.vote(X, i) > 0 ? 1.0 : 0.0;
    return p / static_cast<double>(trees_.size());
  }
  Vector decision(const Matrix& X) const override { return proba_pos(X).array() - 0.5; }
  void dump(std::ostream& os) const override {
    for (std::size_t k = 0; k < trees_.size(); ++k) {
      os << "tree " << k << '\n';
      for (const auto& nd : trees_[k].nodes())
        os << nd.feature << ' ' << nd.threshold << ' ' << nd.left << ' ' << nd.right << ' ' << nd.p_pos << '\n';
    }
  }
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
};

// Bagged CART with sqrt(d) features per split; deterministic in `seed`.
inline std::shared_ptr<ForestModel> fit_forest(const Matrix& X, std::span<const int> y, int n_trees, std::uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(X.rows());
  const auto max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(X.cols()))));
  std::vector<DecisionTree> trees;
  trees.reserve(static_cast<std::size_t>(n_trees));
  for (int t = 0; t < n_trees; ++t) {
    std::vector<std::size_t> boot(n);
    for (auto& b : boot) b = uniform_index(rng, n);
    trees.push_back(DecisionTree::grow(X, y, std::move(boot), max_features, rng));
  }
  return std::make_shared<ForestModel>(std::move(trees));
}

}  // namespace albench
