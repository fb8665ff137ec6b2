#pragma once

#include <memory>

#include "albench/errors.hpp"
#include "albench/forest.hpp"
#include "albench/logistic.hpp"
#include "albench/model.hpp"
#include "albench/platt.hpp"
#include "albench/svm.hpp"

namespace albench {

// Two-class LDA with pooled covariance plus a 1e-6 ridge.
class LdaModel final : public ModelImpl {
 public:
  LdaModel(Vector w, double b) : w_(std::move(w)), b_(b) {}
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

 private:
  Vector w_;
  double b_;
};

inline std::shared_ptr<LdaModel> fit_lda(const Matrix& X, std::span<const int> y) {
  const Eigen::Index d = X.cols();
  Vector mu_pos = Vector::Zero(d), mu_neg = Vector::Zero(d);
  double n_pos = 0, n_neg = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (y[static_cast<std::size_t>(i)] > 0) {
      mu_pos += X.row(i).transpose();
      n_pos += 1;
    } else {
      mu_neg += X.row(i).transpose();
      n_neg += 1;
    }
  }
  mu_pos /= n_pos;
  mu_neg /= n_neg;
  Matrix S = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Vector c = X.row(i).transpose() - (y[static_cast<std::size_t>(i)] > 0 ? mu_pos : mu_neg);
    S.noalias() += c * c.transpose();
  }
  const double dof = std::max(1.0, static_cast<double>(X.rows()) - 2.0);
  S /= dof;
  S.diagonal().array() += 1e-6;
  Vector w = S.ldlt().solve(mu_pos - mu_neg);
  double b = -0.5 * w.dot(mu_pos + mu_neg) + std::log(n_pos / n_neg);
  return std::make_shared<LdaModel>(std::move(w), b);
}

// Refits the probability map of `model` on (X, y). SVMs get a Platt
// sigmoid on their decision values; the other kinds keep their native
// probabilities (vote fractions for RF).
inline TrainedModel calibrate_proba(const TrainedModel& model, const Matrix& X, std::span<const int> y) {
  if (!model.spec().svm_family() || model.is_constant()) return model;
  Vector f = model.decision(X);
  return TrainedModel(model.spec(), model.impl_ptr(), fit_platt(f, y));
}

// Fits a learner. A single-class label vector yields a ConstantModel.
// SVMs are Platt-calibrated unless `calibrate` is false (decision-only use).
inline TrainedModel train(const LearnerSpec& spec, const Matrix& X, std::span<const int> y, bool calibrate = true) {
  if (X.rows() != static_cast<Eigen::Index>(y.size())) throw std::invalid_argument("train: X/y size mismatch");
  if (!X.allFinite()) throw NumericError("train: non-finite feature value");
  if (y.empty()) throw std::invalid_argument("train: empty training set");
  auto [pos, neg] = class_counts(y);
  if (pos == 0 || neg == 0) return TrainedModel(spec, std::make_shared<ConstantModel>(pos > 0 ? +1 : -1));

  switch (spec.kind) {
    case LearnerKind::LR: return TrainedModel(spec, fit_logistic(X, y, spec.C));
    case LearnerKind::SVM_RBF:
    case LearnerKind::SVM_LINEAR: {
      std::optional<double> gamma;
      if (spec.kind == LearnerKind::SVM_RBF) gamma = spec.resolved_gamma(static_cast<std::size_t>(X.cols()));
      auto fit = fit_svm(X, y, spec.C, gamma);
      TrainedModel raw(spec, fit.model);
      return calibrate ? calibrate_proba(raw, X, y) : raw;
    }
    case LearnerKind::RF: return TrainedModel(spec, fit_forest(X, y, spec.n_trees, spec.seed));
    case LearnerKind::LDA: return TrainedModel(spec, fit_lda(X, y));
  }
  throw std::logic_error("unreachable");
}

}  // namespace albench
