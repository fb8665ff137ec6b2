#pragma once

#include <limits>

#include "albench/dataset.hpp"
#include "albench/random.hpp"

namespace albench {

struct KMeansResult {
  std::vector<std::size_t> assignment;
  Matrix centers;
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Ties in assignment go to the
// lower center index; an emptied cluster keeps its previous center.
inline KMeansResult kmeans(const Matrix& X, std::size_t k, Rng& rng, int max_iter = 300) {
  const auto n = static_cast<std::size_t>(X.rows());
  if (n == 0 || k == 0) throw std::invalid_argument("kmeans: empty input");
  k = std::min(k, n);
  KMeansResult r;
  r.centers.resize(static_cast<Eigen::Index>(k), X.cols());

  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t first = uniform_index(rng, n);
  r.centers.row(0) = X.row(static_cast<Eigen::Index>(first));
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (X.row(static_cast<Eigen::Index>(i)) - r.centers.row(static_cast<Eigen::Index>(c - 1))).squaredNorm());
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = uniform_real(rng) * total, acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = uniform_index(rng, n);
    }
    r.centers.row(static_cast<Eigen::Index>(c)) = X.row(static_cast<Eigen::Index>(pick));
  }

  r.assignment.assign(n, k);
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double dist = (X.row(static_cast<Eigen::Index>(i)) - r.centers.row(static_cast<Eigen::Index>(c))).squaredNorm();
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      if (r.assignment[i] != best) {
        r.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(static_cast<Eigen::Index>(k), X.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(r.assignment[i])) += X.row(static_cast<Eigen::Index>(i));
      ++counts[r.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] > 0) r.centers.row(static_cast<Eigen::Index>(c)) = sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
  }
  return r;
}

}  // namespace albench
