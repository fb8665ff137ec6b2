#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "albench/kernel.hpp"
#include "albench/model.hpp"

namespace albench {

struct SmoResult {
  Vector alpha;
  double rho = 0.0;  // f(x) = sum_i alpha_i y_i K(x_i, x) - rho
  long iterations = 0;
  bool converged = true;
};

// Dual soft-margin SVM by sequential pair optimization:
//   min 1/2 a'Qa - 1'a  s.t. 0 <= a_i <= C, y'a = 0,  Q_ij = y_i y_j K_ij.
// Each step takes the maximal KKT violating pair (i minimizes E_i over the
// "up" set, j maximizes E_j over the "low" set, so |E_i - E_j| is largest)
// and stops when the violation falls to tol.
inline SmoResult smo_solve(const Matrix& K, std::span<const int> y, double C, double tol = 1e-3, long max_iter = -1) {
  const Eigen::Index n = K.rows();
  if (max_iter < 0) max_iter = 10000L * std::max<long>(n, 1);
  SmoResult res;
  res.alpha = Vector::Zero(n);
  Vector& a = res.alpha;
  Vector G = Vector::Constant(n, -1.0);
  auto yy = [&](Eigen::Index t) { return static_cast<double>(y[static_cast<std::size_t>(t)]); };
  auto in_up = [&](Eigen::Index t) { return (yy(t) > 0 && a[t] < C) || (yy(t) < 0 && a[t] > 0); };
  auto in_low = [&](Eigen::Index t) { return (yy(t) > 0 && a[t] > 0) || (yy(t) < 0 && a[t] < C); };

  long it = 0;
  for (; it < max_iter; ++it) {
    Eigen::Index i = -1, j = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      double v = -yy(t) * G[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i < 0 || j < 0 || gmax - gmin <= tol) break;

    const double yi = yy(i), yj = yy(j);
    const double Qii = K(i, i), Qjj = K(j, j), Qij = yi * yj * K(i, j);
    const double old_ai = a[i], old_aj = a[j];
    double quad = Qii + Qjj - 2.0 * yi * yj * Qij;
    if (quad <= 0) quad = 1e-12;
    if (yi != yj) {
      double delta = (-G[i] - G[j]) / quad;
      double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0) {
        if (a[j] < 0) {
          a[j] = 0;
          a[i] = diff;
        }
      } else {
        if (a[i] < 0) {
          a[i] = 0;
          a[j] = -diff;
        }
      }
      if (diff > 0) {
        if (a[i] > C) {
          a[i] = C;
          a[j] = C - diff;
        }
      } else {
        if (a[j] > C) {
          a[j] = C;
          a[i] = C + diff;
        }
      }
    } else {
      double delta = (G[i] - G[j]) / quad;
      double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > C) {
        if (a[i] > C) {
          a[i] = C;
          a[j] = sum - C;
        }
      } else {
        if (a[j] < 0) {
          a[j] = 0;
          a[i] = sum;
        }
      }
      if (sum > C) {
        if (a[j] > C) {
          a[j] = C;
          a[i] = sum - C;
        }
      } else {
        if (a[i] < 0) {
          a[i] = 0;
          a[j] = sum;
        }
      }
    }
    const double dai = a[i] - old_ai, daj = a[j] - old_aj;
    for (Eigen::Index t = 0; t < n; ++t) G[t] += yy(t) * (yi * K(t, i) * dai + yj * K(t, j) * daj);
  }
  res.iterations = it;
  res.converged = it < max_iter;

  // Bias from free vectors, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  long n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    double yg = yy(t) * G[t];
    if (a[t] >= C) {
      if (yy(t) < 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (a[t] <= 0) {
      if (yy(t) > 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  if (n_free > 0)
    res.rho = sum_free / static_cast<double>(n_free);
  else if (std::isfinite(ub) && std::isfinite(lb))
    res.rho = (ub + lb) / 2.0;
  else
    res.rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
  return res;
}

class SvmModel final : public ModelImpl {
 public:
  SvmModel(Matrix sv, Vector coef, double rho, std::optional<double> gamma, bool converged, long iterations)
      : sv_(std::move(sv)), coef_(std::move(coef)), rho_(rho), gamma_(gamma), converged_(converged), iterations_(iterations) {
    if (!gamma_) w_ = sv_.transpose() * coef_;
  }

  Vector decision(const Matrix& X) const override {
    if (!gamma_) return (X * w_).array() - rho_;
    if (sv_.rows() == 0) return Vector::Constant(X.rows(), -rho_);
    return (rbf_kernel(X, sv_, *gamma_) * coef_).array() - rho_;
  }
  // Uncalibrated SVMs map decisions through a unit logistic.
  Vector proba_pos(const Matrix& X) const override {
    Vector f = decision(X);
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = sigmoid(f[i]);
    return f;
  }
  void dump(std::ostream& os) const override {
    os << "rho " << rho_ << '\n';
    for (Eigen::Index i = 0; i < sv_.rows(); ++i) {
      os << coef_[i];
      for (Eigen::Index j = 0; j < sv_.cols(); ++j) os << ' ' << sv_(i, j);
      os << '\n';
    }
  }

  bool converged() const { return converged_; }
  long iterations() const { return iterations_; }
  Eigen::Index n_support() const { return sv_.rows(); }

 private:
  Matrix sv_;
  Vector coef_;  // alpha_i * y_i
  double rho_;
  std::optional<double> gamma_;  // nullopt: linear kernel
  Vector w_;
  bool converged_;
  long iterations_;
};

struct SvmFit {
  std::shared_ptr<SvmModel> model;
  SmoResult dual;
};

// gamma == nullopt selects the linear kernel.
inline SvmFit fit_svm(const Matrix& X, std::span<const int> y, double C, std::optional<double> gamma) {
  Matrix K = gamma ? rbf_gram(X, *gamma) : Matrix(X * X.transpose());
  SmoResult dual = smo_solve(K, y, C);
  std::vector<std::size_t> sv_idx;
  for (Eigen::Index i = 0; i < dual.alpha.size(); ++i)
    if (dual.alpha[i] > 0) sv_idx.push_back(static_cast<std::size_t>(i));
  Matrix sv = select_rows(X, sv_idx);
  Vector coef(static_cast<Eigen::Index>(sv_idx.size()));
  for (std::size_t k = 0; k < sv_idx.size(); ++k)
    coef[static_cast<Eigen::Index>(k)] = dual.alpha[static_cast<Eigen::Index>(sv_idx[k])] * y[sv_idx[k]];
  auto model = std::make_shared<SvmModel>(std::move(sv), std::move(coef), dual.rho, gamma, dual.converged, dual.iterations);
  return {std::move(model), std::move(dual)};
}

}  // namespace albench
