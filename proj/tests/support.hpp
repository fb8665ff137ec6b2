#pragma once

#include <random>

#include "albench/strategy.hpp"

namespace albench::fixtures {

// Gaussian blobs: class +1 around +shift, class -1 around -shift.
inline Dataset gaussian_dataset(std::size_t n, std::size_t d, double shift, std::uint64_t seed, const std::string& name = "blobs") {
  Rng rng(seed);
  std::normal_distribution<double> N;
  Dataset ds;
  ds.name = name;
  ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    int y = (i % 2 == 0) ? 1 : -1;
    ds.y.push_back(y);
    for (std::size_t j = 0; j < d; ++j) ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = N(rng) + y * shift;
  }
  return ds;
}

// A labeled/unlabeled split of fresh Gaussian data; labeled rows hold both
// classes. Original indices: labeled 0..l-1, unlabeled l..l+u-1.
inline StrategyContext random_context(std::size_t l, std::size_t u, std::size_t d, Rng& rng, double shift = 0.7) {
  std::normal_distribution<double> N;
  StrategyContext c;
  c.X_l.resize(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(d));
  c.X_u.resize(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < l; ++i) {
    int y = (i % 2 == 0) ? 1 : -1;
    c.y_l.push_back(y);
    c.l_index.push_back(i);
    for (std::size_t j = 0; j < d; ++j) c.X_l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = N(rng) + y * shift;
  }
  for (std::size_t i = 0; i < u; ++i) {
    int y = uniform_index(rng, 2) ? 1 : -1;
    c.u_index.push_back(l + i);
    for (std::size_t j = 0; j < d; ++j) c.X_u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = N(rng) + y * shift;
  }
  c.query_model = LearnerSpec::svm_rbf();
  c.task_model = LearnerSpec::svm_rbf();
  c.rng = &rng;
  return c;
}

}  // namespace albench::fixtures
