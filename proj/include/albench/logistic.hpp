#pragma once

#include <cmath>
#include <memory>

#include "albench/model.hpp"

namespace albench {

class LogisticModel final : public ModelImpl {
 public:
  LogisticModel(Vector w, double b, double grad_norm, int iterations)
      : w_(std::move(w)), b_(b), grad_norm_(grad_norm), iterations_(iterations) {}

  Vector decision(const Matrix& X) const override { return (X * w_).array() + b_; }
  Vector proba_pos(const Matrix& X) const override {
    Vector f = decision(X);
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = sigmoid(f[i]);
    return f;
  }
  void dump(std::ostream& os) const override {
    os << "bias " << b_ << '\n';
    for (Eigen::Index j = 0; j < w_.size(); ++j) os << "w" << j << ' ' << w_[j] << '\n';
  }

  const Vector& weights() const { return w_; }
  double bias() const { return b_; }
  double grad_norm() const { return grad_norm_; }
  int iterations() const { return iterations_; }

 private:
  Vector w_;
  double b_;
  double grad_norm_;
  int iterations_;
};

// log(1 + exp(-m)) without overflow.
inline double log1pexp_neg(double m) { return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)); }

// Objective value and gradient of sum_i log(1+exp(-y_i f_i)) + ||w||^2/(2C)
// with unregularized intercept. theta = (w, b).
inline double logistic_objective(const Matrix& X, std::span<const int> y, double C, const Vector& theta, Vector* grad) {
  const Eigen::Index d = X.cols();
  Vector w = theta.head(d);
  double b = theta[d];
  Vector f = (X * w).array() + b;
  double obj = w.squaredNorm() / (2.0 * C);
  Vector r(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double yi = y[static_cast<std::size_t>(i)];
    double m = yi * f[i];
    obj += log1pexp_neg(m);
    r[i] = -yi * sigmoid(-m);
  }
  if (grad) {
    grad->resize(d + 1);
    grad->head(d) = X.transpose() * r + w / C;
    (*grad)[d] = r.sum();
  }
  return obj;
}

// Newton's method with backtracking; stops when the gradient's max-norm
// reaches tol.
inline std::shared_ptr<LogisticModel> fit_logistic(const Matrix& X, std::span<const int> y, double C, double tol = 1e-8,
                                                   int max_iter = 200) {
  const Eigen::Index d = X.cols();
  const Eigen::Index n = X.rows();
  Vector theta = Vector::Zero(d + 1);
  Vector grad;
  double obj = logistic_objective(X, y, C, theta, &grad);
  int it = 0;
  for (; it < max_iter && grad.lpNorm<Eigen::Infinity>() > tol; ++it) {
    Vector f = (X * theta.head(d)).array() + theta[d];
    Matrix H = Matrix::Zero(d + 1, d + 1);
    Vector s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double p = sigmoid(f[i]);
      s[i] = p * (1.0 - p);
    }
    Matrix Xa(n, d + 1);
    Xa.leftCols(d) = X;
    Xa.col(d).setOnes();
    H.noalias() = Xa.transpose() * s.asDiagonal() * Xa;
    H.topLeftCorner(d, d).diagonal().array() += 1.0 / C;
    H.diagonal().array() += 1e-12;
    Vector step = H.ldlt().solve(-grad);
    double t = 1.0;
    Vector next_grad;
    double next_obj = 0.0;
    const double slope = grad.dot(step);
    // Newton decrement below rounding: no representable progress left.
    if (-slope <= 1e-15 * (1.0 + std::abs(obj))) break;
    while (true) {
      Vector cand = theta + t * step;
      next_obj = logistic_objective(X, y, C, cand, &next_grad);
      if (next_obj <= obj + 1e-4 * t * slope || t < 1e-10) {
        theta = cand;
        break;
      }
      t *= 0.5;
    }
    if (std::abs(obj - next_obj) == 0.0 && t < 1e-10) {
      obj = next_obj;
      grad = next_grad;
      break;
    }
    obj = next_obj;
    grad = next_grad;
  }
  return std::make_shared<LogisticModel>(theta.head(d), theta[d], grad.lpNorm<Eigen::Infinity>(), it);
}

}  // namespace albench
