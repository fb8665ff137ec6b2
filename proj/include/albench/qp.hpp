#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "albench/dataset.hpp"
#include "albench/errors.hpp"
#include "albench/kernel.hpp"

namespace albench {

struct StabilizedKernel {
  Matrix K;
  double epsilon = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

// Symmetrizes K and adds eps*I, escalating eps from 1e-15 by x10 until the
// smallest eigenvalue is positive. Throws NumericError past 1e-6. Steps that
// the shifted spectrum already rules out are skipped; the rest are confirmed
// by a fresh eigensolve, since lo + eps can sit inside solver roundoff.
inline StabilizedKernel stabilize_kernel(const Matrix& K) {
  if (K.rows() != K.cols()) throw std::invalid_argument("stabilize_kernel: matrix not square");
  const Matrix S = symmetrize(K);
  if (S.rows() == 0) return {S, 1e-15, 1.0, 1.0};
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  double achieved = lo;
  for (double eps = 1e-15; eps <= 1e-6 * (1 + 1e-9); eps *= 10.0) {
    if (lo + eps <= 0.0) continue;
    Matrix T = S;
    T.diagonal().array() += eps;
    Eigen::SelfAdjointEigenSolver<Matrix> check(T, Eigen::EigenvaluesOnly);
    achieved = check.eigenvalues().minCoeff();
    if (achieved > 0.0) return {std::move(T), eps, achieved, check.eigenvalues().maxCoeff()};
  }
  throw NumericError("stabilize_kernel: smallest eigenvalue stays non-positive at eps=1e-6", achieved);
}

// Euclidean projection of v onto {a : 0 <= a <= 1, e'a = b}; e > 0 and
// 0 <= b <= sum(e). The solution has the form clip(v - tau*e, 0, 1).
inline Vector project_box_hyperplane(const Vector& v, const Vector& e, double b) {
  const Eigen::Index n = v.size();
  auto clipped = [&](double tau) {
    Vector a(n);
    for (Eigen::Index j = 0; j < n; ++j) a[j] = std::clamp(v[j] - tau * e[j], 0.0, 1.0);
    return a;
  };
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index j = 0; j < n; ++j) {
    lo = std::min(lo, (v[j] - 1.0) / e[j]);
    hi = std::max(hi, v[j] / e[j]);
  }
  // e'clip(v - tau e) is nonincreasing in tau: >= b at lo, <= b at hi.
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (e.dot(clipped(mid)) > b)
      lo = mid;
    else
      hi = mid;
  }
  double tau = 0.5 * (lo + hi);
  // Solve exactly on the linear piece containing tau.
  Vector a = clipped(tau);
  double free_ee = 0.0, free_ev = 0.0, upper = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (a[j] > 0.0 && a[j] < 1.0) {
      free_ee += e[j] * e[j];
      free_ev += e[j] * v[j];
    } else if (a[j] >= 1.0) {
      upper += e[j];
    }
  }
  if (free_ee > 0.0) {
    double exact = (free_ev + upper - b) / free_ee;
    Vector cand = clipped(exact);
    if (std::abs(e.dot(cand) - b) <= std::abs(e.dot(a) - b)) a = cand;
  }
  return a;
}

struct BoxQpResult {
  Vector alpha;
  int iterations = 0;
  bool converged = false;
};

// Projected gradient for min 1/2 a'Ha + g'a over {0 <= a <= 1, e'a = b},
// step 1/L with L the largest eigenvalue of H (step 1 when H = 0).
inline BoxQpResult solve_box_qp(const Matrix& H, const Vector& g, const Vector& e, double b, double lipschitz, int max_iter = 500,
                                double tol = 1e-8) {
  const Eigen::Index n = g.size();
  BoxQpResult r;
  r.alpha = Vector::Constant(n, b / e.sum());
  const double step = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    Vector grad = H * r.alpha + g;
    Vector next = project_box_hyperplane(r.alpha - step * grad, e, b);
    double delta = (next - r.alpha).norm();
    r.alpha = std::move(next);
    if (delta <= tol) {
      r.converged = true;
      ++r.iterations;
      break;
    }
  }
  return r;
}

}  // namespace albench
