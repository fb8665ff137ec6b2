#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "albench/dataset.hpp"

namespace albench {

enum class LearnerKind { LR, SVM_RBF, SVM_LINEAR, RF, LDA };

inline std::string_view kind_name(LearnerKind k) {
  switch (k) {
    case LearnerKind::LR: return "lr";
    case LearnerKind::SVM_RBF: return "svm_rbf";
    case LearnerKind::SVM_LINEAR: return "svm_linear";
    case LearnerKind::RF: return "rf";
    case LearnerKind::LDA: return "lda";
  }
  return "?";
}

struct LearnerSpec {
  LearnerKind kind = LearnerKind::SVM_RBF;
  double C = 1.0;
  std::optional<double> gamma;  // nullopt means "auto" = 1/d
  int n_trees = 100;
  std::uint64_t seed = 0;

  double resolved_gamma(std::size_t d) const { return gamma ? *gamma : 1.0 / static_cast<double>(d); }
  bool margin_based() const { return kind != LearnerKind::RF; }
  bool svm_family() const { return kind == LearnerKind::SVM_RBF || kind == LearnerKind::SVM_LINEAR; }

  bool operator==(const LearnerSpec&) const = default;

  static LearnerSpec lr(double C = 1.0) { return {LearnerKind::LR, C, std::nullopt, 100, 0}; }
  static LearnerSpec svm_rbf(double C = 1.0, std::optional<double> gamma = std::nullopt) {
    return {LearnerKind::SVM_RBF, C, gamma, 100, 0};
  }
  static LearnerSpec svm_linear(double C = 1.0) { return {LearnerKind::SVM_LINEAR, C, std::nullopt, 100, 0}; }
  static LearnerSpec rf(int n_trees = 100, std::uint64_t seed = 0) { return {LearnerKind::RF, 1.0, std::nullopt, n_trees, seed}; }
  static LearnerSpec lda() { return {LearnerKind::LDA, 1.0, std::nullopt, 100, 0}; }

  // Canonical text form, e.g. "lr:C=0.1", "svm_rbf:C=1:gamma=auto", "rf:trees=100".
  std::string to_string() const {
    std::ostringstream os;
    os << kind_name(kind);
    switch (kind) {
      case LearnerKind::LR:
      case LearnerKind::SVM_LINEAR: os << ":C=" << C; break;
      case LearnerKind::SVM_RBF:
        os << ":C=" << C << ":gamma=";
        if (gamma)
          os << *gamma;
        else
          os << "auto";
        break;
      case LearnerKind::RF: os << ":trees=" << n_trees; break;
      case LearnerKind::LDA: break;
    }
    return os.str();
  }

  // Inverse of to_string; bare kind names take the defaults. Accepts the
  // aliases "rbf"/"svm" for svm_rbf and "linear" for svm_linear.
  static LearnerSpec parse(std::string_view text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
      if (c == ':') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    LearnerSpec s;
    const std::string& k = parts[0];
    if (k == "lr")
      s = lr();
    else if (k == "svm_rbf" || k == "rbf" || k == "svm")
      s = svm_rbf();
    else if (k == "svm_linear" || k == "linear")
      s = svm_linear();
    else if (k == "rf")
      s = rf();
    else if (k == "lda")
      s = lda();
    else
      throw std::invalid_argument("unknown learner '" + k + "'");
    for (std::size_t i = 1; i < parts.size(); ++i) {
      auto eq = parts[i].find('=');
      if (eq == std::string::npos) throw std::invalid_argument("bad learner option '" + parts[i] + "'");
      std::string key = parts[i].substr(0, eq), val = parts[i].substr(eq + 1);
      if (key == "C")
        s.C = std::stod(val);
      else if (key == "gamma")
        s.gamma = val == "auto" ? std::nullopt : std::optional<double>(std::stod(val));
      else if (key == "trees")
        s.n_trees = std::stoi(val);
      else if (key == "seed")
        s.seed = std::stoull(val);
      else
        throw std::invalid_argument("unknown learner option '" + key + "'");
    }
    if (!(s.C > 0.0)) throw std::invalid_argument("C must be positive");
    if (s.gamma && !(*s.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (s.n_trees < 1) throw std::invalid_argument("trees must be >= 1");
    return s;
  }
};

inline double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

// A fitted predictor. decision() is the real-valued score f(x) whose sign
// gives the label; proba_pos() is P(y=+1|x).
class ModelImpl {
 public:
  virtual ~ModelImpl() = default;
  virtual Vector decision(const Matrix& X) const = 0;
  virtual Vector proba_pos(const Matrix& X) const = 0;
  virtual void dump(std::ostream& os) const = 0;
};

class ConstantModel final : public ModelImpl {
 public:
  explicit ConstantModel(int label) : label_(label) {}
  Vector decision(const Matrix& X) const override { return Vector::Constant(X.rows(), label_ > 0 ? 1.0 : -1.0); }
  Vector proba_pos(const Matrix& X) const override { return Vector::Constant(X.rows(), label_ > 0 ? 1.0 : 0.0); }
  void dump(std::ostream& os) const override { os << "constant " << label_ << '\n'; }
  int label() const { return label_; }

 private:
  int label_;
};

struct PlattParams {
  double A = 0.0;
  double B = 0.0;
  bool prior_only = false;  // degenerate fit: p = prior
  double prior = 0.5;

  double apply(double f) const { return prior_only ? prior : sigmoid(-(A * f + B)); }
};

class TrainedModel {
 public:
  TrainedModel() = default;
  TrainedModel(LearnerSpec spec, std::shared_ptr<const ModelImpl> impl, std::optional<PlattParams> platt = std::nullopt)
      : spec_(spec), impl_(std::move(impl)), platt_(platt) {}

  const LearnerSpec& spec() const { return spec_; }
  const ModelImpl& impl() const { return *impl_; }
  std::shared_ptr<const ModelImpl> impl_ptr() const { return impl_; }
  const std::optional<PlattParams>& platt() const { return platt_; }
  bool is_constant() const { return dynamic_cast<const ConstantModel*>(impl_.get()) != nullptr; }

  Vector decision(const Matrix& X) const { return impl_->decision(X); }

  Vector proba_pos(const Matrix& X) const {
    if (platt_ && !is_constant()) {
      Vector f = impl_->decision(X);
      for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = platt_->apply(f[i]);
      return f;
    }
    return impl_->proba_pos(X);
  }

  // Ties at decision 0 predict +1.
  Labels predict(const Matrix& X) const {
    Vector f = decision(X);
    Labels out(static_cast<std::size_t>(f.size()));
    for (Eigen::Index i = 0; i < f.size(); ++i) out[static_cast<std::size_t>(i)] = f[i] >= 0.0 ? +1 : -1;
    return out;
  }

  double accuracy(const Matrix& X, std::span<const int> y) const {
    if (y.empty()) return 0.0;
    Labels p = predict(X);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < y.size(); ++i) hit += p[i] == y[i];
    return static_cast<double>(hit) / static_cast<double>(y.size());
  }

  void dump(std::ostream& os) const {
    os << "# " << spec_.to_string() << '\n';
    if (platt_) os << "platt " << platt_->A << ' ' << platt_->B << '\n';
    impl_->dump(os);
  }

 private:
  LearnerSpec spec_;
  std::shared_ptr<const ModelImpl> impl_;
  std::optional<PlattParams> platt_;
};

}  // namespace albench
