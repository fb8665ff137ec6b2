#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "albench/errors.hpp"
#include "albench/strategies.hpp"

namespace albench {

inline const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names = {"uniform", "us-c", "us-nc", "qbc",  "eer",  "coreset", "graph",
                                                 "dwus",    "mcm",  "infodiv", "bmdr", "spal", "albl",    "bso"};
  return names;
}

inline bool is_strategy(const std::string& name) {
  const auto& n = strategy_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

inline std::string strategy_listing() {
  std::string s;
  for (const auto& n : strategy_names()) s += n + "\n";
  return s;
}

struct StrategyOptions {
  std::vector<LearnerSpec> committee = default_committee();
  EerLoss eer_loss = EerLoss::ZERO_ONE;
  std::size_t eer_candidate_cap = 250;
  std::size_t eer_eval_cap = 500;
  std::size_t k_clusters = 10;
  double bmdr_beta = 1000.0;
  double bmdr_lambda = 1.0;
  double bmdr_b = 1.0;
  double albl_explore = 0.1;
};

// Query model a strategy consults when the user gives none: the task model,
// except US-NC which pairs LR(C=0.1) with entropy.
inline LearnerSpec default_query_model(const std::string& name, const LearnerSpec& task) {
  if (name == "us-nc") return LearnerSpec::lr(0.1);
  return task;
}

// Adapts a stateless selection function to the strategy interface.
class FunctionStrategy final : public QueryStrategy {
 public:
  using Fn = std::function<std::size_t(const StrategyContext&)>;
  explicit FunctionStrategy(Fn fn) : fn_(std::move(fn)) {}
  std::size_t select(const StrategyContext& ctx) override { return fn_(ctx); }

 private:
  Fn fn_;
};

// Uncertainty sampling; with `fixed` set it ignores ctx.query_model.
class UncertaintyStrategy final : public QueryStrategy {
 public:
  UncertaintyStrategy(UncertaintyMeasure m, std::optional<LearnerSpec> fixed = std::nullopt) : measure_(m), fixed_(std::move(fixed)) {}
  std::size_t select(const StrategyContext& ctx) override {
    if (!fixed_ || *fixed_ == ctx.query_model) return select_us(ctx, measure_);
    StrategyContext c = ctx;
    c.query_model = *fixed_;
    return select_us(c, measure_);
  }

 private:
  UncertaintyMeasure measure_;
  std::optional<LearnerSpec> fixed_;
};

inline std::vector<std::unique_ptr<QueryStrategy>> default_albl_arms(const LearnerSpec& task) {
  std::vector<std::unique_ptr<QueryStrategy>> arms;
  arms.push_back(std::make_unique<UncertaintyStrategy>(UncertaintyMeasure::MARGIN, task));
  arms.push_back(std::make_unique<UncertaintyStrategy>(UncertaintyMeasure::ENTROPY, LearnerSpec::lr(0.1)));
  arms.push_back(std::make_unique<FunctionStrategy>(select_uniform));
  return arms;
}

// `bso` is listed but needs test labels, so the engine runs it separately.
inline std::unique_ptr<QueryStrategy> make_strategy(const std::string& name, const LearnerSpec& task, const StrategyOptions& o = {}) {
  using F = FunctionStrategy;
  if (name == "uniform") return std::make_unique<F>(select_uniform);
  if (name == "us-c") return std::make_unique<UncertaintyStrategy>(UncertaintyMeasure::MARGIN);
  if (name == "us-nc") return std::make_unique<UncertaintyStrategy>(UncertaintyMeasure::ENTROPY);
  if (name == "qbc") return std::make_unique<F>([c = o.committee](const StrategyContext& ctx) { return select_qbc(ctx, c); });
  if (name == "eer")
    return std::make_unique<F>([o](const StrategyContext& ctx) { return select_eer(ctx, o.eer_loss, o.eer_candidate_cap, o.eer_eval_cap); });
  if (name == "coreset") return std::make_unique<F>(select_coreset);
  if (name == "graph") return std::make_unique<GraphDensityStrategy>();
  if (name == "dwus") return std::make_unique<F>(select_dwus);
  if (name == "mcm") return std::make_unique<F>([k = o.k_clusters](const StrategyContext& ctx) { return select_mcm(ctx, k); });
  if (name == "infodiv")
    return std::make_unique<F>([k = o.k_clusters](const StrategyContext& ctx) { return select_infodiv(ctx, 1, k).front(); });
  if (name == "bmdr")
    return std::make_unique<F>([o](const StrategyContext& ctx) { return select_bmdr(ctx, o.bmdr_beta, o.bmdr_lambda, o.bmdr_b); });
  if (name == "spal")
    return std::make_unique<F>([o](const StrategyContext& ctx) {
      return select_spal(ctx, o.bmdr_beta, o.bmdr_lambda, o.bmdr_b, Vector::Ones(ctx.X_u.rows()));
    });
  if (name == "albl") return std::make_unique<AlblStrategy>(default_albl_arms(task), o.albl_explore);
  throw UnknownStrategy(name);
}

}  // namespace albench
