#pragma once

#include <cmath>

#include "albench/model.hpp"

namespace albench {

// Sigmoid fit p(+1|f) = 1/(1+exp(A f + B)) by Newton's method on the
// regularized log-loss (targets (N+ + 1)/(N+ + 2) and 1/(N- + 2)).
// Falls back to the class prior when the decision values carry no signal
// or the fit comes out with the wrong orientation (A >= 0).
inline PlattParams fit_platt(const Vector& f, std::span<const int> y) {
  const Eigen::Index n = f.size();
  double prior1 = 0, prior0 = 0;
  for (int v : y) (v > 0 ? prior1 : prior0) += 1.0;
  PlattParams out;
  out.prior = n > 0 ? prior1 / static_cast<double>(n) : 0.5;
  if (n == 0 || f.maxCoeff() == f.minCoeff()) {
    out.prior_only = true;
    return out;
  }

  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  Vector t(n);
  for (Eigen::Index i = 0; i < n; ++i) t[i] = y[static_cast<std::size_t>(i)] > 0 ? hi : lo;

  const int max_iter = 100;
  const double min_step = 1e-10, sigma = 1e-12, eps = 1e-5;
  double A = 0.0, B = std::log((prior0 + 1.0) / (prior1 + 1.0));
  auto objective = [&](double a, double b) {
    double fval = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double fApB = f[i] * a + b;
      if (fApB >= 0)
        fval += t[i] * fApB + std::log1p(std::exp(-fApB));
      else
        fval += (t[i] - 1.0) * fApB + std::log1p(std::exp(fApB));
    }
    return fval;
  };
  double fval = objective(A, B);
  for (int it = 0; it < max_iter; ++it) {
    double h11 = sigma, h22 = sigma, h21 = 0, g1 = 0, g2 = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double fApB = f[i] * A + B;
      double p, q;
      if (fApB >= 0) {
        p = std::exp(-fApB) / (1.0 + std::exp(-fApB));
        q = 1.0 / (1.0 + std::exp(-fApB));
      } else {
        p = 1.0 / (1.0 + std::exp(fApB));
        q = std::exp(fApB) / (1.0 + std::exp(fApB));
      }
      double d2 = p * q;
      h11 += f[i] * f[i] * d2;
      h22 += d2;
      h21 += f[i] * d2;
      double d1 = t[i] - p;
      g1 += f[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < eps && std::abs(g2) < eps) break;
    double det = h11 * h22 - h21 * h21;
    double dA = -(h22 * g1 - h21 * g2) / det;
    double dB = -(-h21 * g1 + h11 * g2) / det;
    double gd = g1 * dA + g2 * dB;
    double step = 1.0;
    while (step >= min_step) {
      double nA = A + step * dA, nB = B + step * dB;
      double nf = objective(nA, nB);
      if (nf < fval + 1e-4 * step * gd) {
        A = nA;
        B = nB;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < min_step) break;
  }
  if (!(A < 0.0) || !std::isfinite(A) || !std::isfinite(B)) {
    out.prior_only = true;
    return out;
  }
  out.A = A;
  out.B = B;
  return out;
}

}  // namespace albench
