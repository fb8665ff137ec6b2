#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "albench/dataset.hpp"
#include "albench/learners.hpp"
#include "albench/random.hpp"

namespace albench {

// Everything a query strategy may look at in one round. Unlabeled rows come
// without labels; `u_index`/`l_index` carry original dataset indices and are
// sorted ascending, so "first maximum" means "lowest original index".
struct StrategyContext {
  Matrix X_l;
  Labels y_l;
  IndexList l_index;
  Matrix X_u;
  IndexList u_index;
  LearnerSpec query_model;
  LearnerSpec task_model;
  // Task model already fitted on (X_l, y_l) this round, if the caller has one.
  const TrainedModel* task_fit = nullptr;
  std::size_t batch = 1;
  Rng* rng = nullptr;
};

class QueryStrategy {
 public:
  virtual ~QueryStrategy() = default;
  // Returns an original index taken from ctx.u_index.
  virtual std::size_t select(const StrategyContext& ctx) = 0;
  // Drops per-trial state.
  virtual void reset() {}
};

enum class UncertaintyMeasure { MARGIN, ENTROPY, LEAST_CONFIDENCE };

// First position of the maximum; NaN never wins.
inline std::size_t argmax_first(const Vector& s) {
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (std::isnan(s[i])) continue;
    if (!any || s[i] > best_v) {
      best_v = s[i];
      best = static_cast<std::size_t>(i);
      any = true;
    }
  }
  return best;
}

inline std::size_t argmin_first(const Vector& s) { return argmax_first(-s); }

inline TrainedModel fit_query_model(const StrategyContext& ctx) {
  if (ctx.task_fit && ctx.query_model == ctx.task_model) return *ctx.task_fit;
  return train(ctx.query_model, ctx.X_l, ctx.y_l);
}

inline double entropy2(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

// Higher = more uncertain. From p = P(+1|x):
//   MARGIN            -|p+ - p-|
//   ENTROPY           -sum p log p (nats)
//   LEAST_CONFIDENCE  -max(p+, p-)
inline double uncertainty(double p_pos, UncertaintyMeasure m) {
  const double p_neg = 1.0 - p_pos;
  switch (m) {
    case UncertaintyMeasure::MARGIN: return -std::abs(p_pos - p_neg);
    case UncertaintyMeasure::ENTROPY: return entropy2(p_pos);
    case UncertaintyMeasure::LEAST_CONFIDENCE: return -std::max(p_pos, p_neg);
  }
  return 0.0;
}

inline Vector uncertainty_scores(const Vector& p_pos, UncertaintyMeasure m) {
  Vector s(p_pos.size());
  for (Eigen::Index i = 0; i < p_pos.size(); ++i) s[i] = uncertainty(p_pos[i], m);
  return s;
}

inline Vector uncertainty_scores(const TrainedModel& model, const Matrix& X_u, UncertaintyMeasure m) {
  return uncertainty_scores(model.proba_pos(X_u), m);
}

}  // namespace albench
