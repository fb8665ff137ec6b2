#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>

#include "albench/bso.hpp"
#include "albench/registry.hpp"

namespace albench {

inline constexpr std::size_t kSmallDatasetLimit = 2000;
inline constexpr std::size_t kBsoSizeLimit = 1600;

struct ExperimentConfig {
  double test_fraction = 0.4;
  std::size_t init_labeled = 20;
  std::optional<std::size_t> budget;    // default: |D_u| at t = 0
  std::optional<std::size_t> keep;      // default by size class
  std::optional<std::size_t> attempts;  // default by size class
  double trial_timeout_s = 120.0;
  double cell_timeout_s = 1800.0;
  LearnerSpec task_model = LearnerSpec::svm_rbf();
  std::optional<LearnerSpec> query_model;  // default per strategy
  std::uint64_t base_seed = 0;
  StrategyOptions strategy_options;
  std::size_t bso_width = 5;
  std::size_t bso_expansion = 10;
  bool bso_force = false;
  bool record_timing = true;

  // Small datasets: 100 kept of 150 attempted; large: 10 of 15.
  std::size_t keep_for(std::size_t n) const { return keep.value_or(n < kSmallDatasetLimit ? 100 : 10); }
  std::size_t attempts_for(std::size_t n) const {
    return std::max(attempts.value_or(n < kSmallDatasetLimit ? 150 : 15), keep_for(n));
  }
  LearnerSpec query_model_for(const std::string& strategy) const { return query_model.value_or(default_query_model(strategy, task_model)); }
};

enum class TrialStatusKind { DONE, COLD_START, TLE, MODULE_ERROR };

inline const char* status_name(TrialStatusKind k) {
  switch (k) {
    case TrialStatusKind::DONE: return "DONE";
    case TrialStatusKind::COLD_START: return "COLD_START";
    case TrialStatusKind::TLE: return "TLE";
    case TrialStatusKind::MODULE_ERROR: return "MODULE_ERROR";
  }
  return "?";
}

inline TrialStatusKind parse_status(const std::string& s) {
  for (auto k : {TrialStatusKind::DONE, TrialStatusKind::COLD_START, TrialStatusKind::TLE, TrialStatusKind::MODULE_ERROR})
    if (s == status_name(k)) return k;
  throw Error("unknown trial status '" + s + "'");
}

struct TrialStatus {
  TrialStatusKind kind = TrialStatusKind::DONE;
  std::string detail;
};

struct TrialRecord {
  std::string dataset;
  std::string strategy;
  std::uint64_t seed = 0;
  std::size_t t = 0;
  long long queried = -1;  // original dataset index; -1 at t = 0
  std::size_t n_labeled = 0;
  double acc = 0.0;
  double wall_ms = 0.0;
};

struct TrialResult {
  TrialStatus status;
  std::vector<TrialRecord> records;  // complete only when DONE
};

// Seeds. The split and the initial pool depend on (base, dataset, seed)
// only, so every strategy sees the same data for a given seed; the
// strategy's own stream also mixes in the strategy name.
inline std::uint64_t split_seed(const ExperimentConfig& c, const std::string& ds, std::uint64_t s) { return hash64(c.base_seed, "split", ds, s); }
inline std::uint64_t pool_seed(const ExperimentConfig& c, const std::string& ds, std::uint64_t s) { return hash64(c.base_seed, "pool", ds, s); }
inline std::uint64_t strategy_seed(const ExperimentConfig& c, const std::string& ds, const std::string& st, std::uint64_t s) {
  return hash64(c.base_seed, "strategy", ds, st, s);
}

// Called after every round with positions into the training split.
using RoundObserver = std::function<void(std::size_t t, const PoolState& pool, std::optional<std::size_t> queried_pos)>;

struct TrialData {
  DataSplit split;
  Matrix X_train, X_test;
  Labels y_train, y_test;
  PoolState pool;
};

// Split, class check, standardization, initial pool. Throws ColdStart.
inline TrialData prepare_trial(const ExperimentConfig& cfg, const Dataset& ds, std::uint64_t seed) {
  validate(ds);
  TrialData d;
  d.split = split_train_test(ds, cfg.test_fraction, split_seed(cfg, ds.name, seed));
  d.y_train = select(ds.y, d.split.train_idx);
  d.y_test = select(ds.y, d.split.test_idx);
  auto [pos, neg] = class_counts(d.y_train);
  if (pos == 0 || neg == 0) throw ColdStart("training split holds a single class");
  auto st = standardize(select_rows(ds.X, d.split.train_idx), select_rows(ds.X, d.split.test_idx));
  d.X_train = std::move(st.train);
  d.X_test = std::move(st.test);
  d.pool = init_pool(d.y_train, cfg.init_labeled, pool_seed(cfg, ds.name, seed));
  return d;
}

inline TrialResult run_bso_trial(const ExperimentConfig& cfg, const Dataset& ds, std::uint64_t seed, const TrialData& d, std::size_t T,
                                 std::chrono::steady_clock::time_point start) {
  TrialResult r;
  if (ds.n() > kBsoSizeLimit && !cfg.bso_force) {
    r.status = {TrialStatusKind::MODULE_ERROR, "bso is limited to n <= " + std::to_string(kBsoSizeLimit) + " unless forced"};
    return r;
  }
  BsoOptions o;
  o.width = cfg.bso_width;
  o.expansion = cfg.bso_expansion;
  o.deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(cfg.trial_timeout_s));
  auto res = bso_run(d.X_train, d.y_train, d.X_test, d.y_test, cfg.task_model, d.pool, T, o);
  const double ms = cfg.record_timing ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count() : 0.0;
  for (std::size_t t = 0; t < res.curve.size(); ++t) {
    long long q = t == 0 ? -1 : static_cast<long long>(d.split.train_idx[res.sequence[t - 1]]);
    r.records.push_back({ds.name, "bso", seed, t, q, d.pool.labeled.size() + t, res.curve[t], ms});
  }
  if (res.truncated) r.status = {TrialStatusKind::TLE, "beam search truncated at t=" + std::to_string(res.sequence.size())};
  return r;
}

// One trial of the query loop: fit the task model on D_l, record test
// accuracy, ask the strategy for a point of D_u, reveal its label, repeat.
inline TrialResult run_trial(const ExperimentConfig& cfg, const Dataset& ds, const std::string& strategy, std::uint64_t seed,
                             const RoundObserver& observe = {}) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return cfg.record_timing ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count() : 0.0;
  };
  if (!is_strategy(strategy)) throw UnknownStrategy(strategy);
  TrialResult r;
  TrialData d;
  try {
    d = prepare_trial(cfg, ds, seed);
  } catch (const ColdStart& e) {
    r.status = {TrialStatusKind::COLD_START, e.what()};
    return r;
  } catch (const std::exception& e) {
    r.status = {TrialStatusKind::MODULE_ERROR, e.what()};
    return r;
  }
  const std::size_t T = std::min(cfg.budget.value_or(d.pool.unlabeled.size()), d.pool.unlabeled.size());
  if (strategy == "bso") return run_bso_trial(cfg, ds, seed, d, T, start);

  try {
    auto strat = make_strategy(strategy, cfg.task_model, cfg.strategy_options);
    Rng rng(strategy_seed(cfg, ds.name, strategy, seed));
    PoolState pool = d.pool;
    StrategyContext ctx;
    ctx.query_model = cfg.query_model_for(strategy);
    ctx.task_model = cfg.task_model;
    ctx.rng = &rng;

    auto fit_and_record = [&](std::size_t t, long long queried) {
      ctx.X_l = select_rows(d.X_train, pool.labeled);
      ctx.y_l = select(d.y_train, pool.labeled);
      TrainedModel task = train(cfg.task_model, ctx.X_l, ctx.y_l);
      r.records.push_back({ds.name, strategy, seed, t, queried, pool.labeled.size(), task.accuracy(d.X_test, d.y_test), elapsed_ms()});
      return task;
    };
    auto timed_out = [&] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() > cfg.trial_timeout_s;
    };

    TrainedModel task = fit_and_record(0, -1);
    if (observe) observe(0, pool, std::nullopt);
    for (std::size_t t = 1; t <= T; ++t) {
      if (timed_out()) {
        r.status = {TrialStatusKind::TLE, "trial time limit reached at t=" + std::to_string(t - 1)};
        return r;
      }
      ctx.X_u = select_rows(d.X_train, pool.unlabeled);
      ctx.u_index.clear();
      ctx.l_index.clear();
      for (auto p : pool.unlabeled) ctx.u_index.push_back(d.split.train_idx[p]);
      for (auto p : pool.labeled) ctx.l_index.push_back(d.split.train_idx[p]);
      ctx.task_fit = &task;
      const std::size_t pick = strat->select(ctx);
      ctx.task_fit = nullptr;
      auto it = std::lower_bound(ctx.u_index.begin(), ctx.u_index.end(), pick);
      if (it == ctx.u_index.end() || *it != pick) throw Error("strategy returned index " + std::to_string(pick) + " outside the unlabeled pool");
      const std::size_t pos = pool.unlabeled[static_cast<std::size_t>(it - ctx.u_index.begin())];
      pool.unlabeled.erase(pool.unlabeled.begin() + (it - ctx.u_index.begin()));
      pool.labeled.insert(std::upper_bound(pool.labeled.begin(), pool.labeled.end(), pos), pos);
      task = fit_and_record(t, static_cast<long long>(pick));
      if (observe) observe(t, pool, pos);
    }
  } catch (const ColdStart& e) {
    r.status = {TrialStatusKind::MODULE_ERROR, std::string("cold start inside the loop: ") + e.what()};
  } catch (const std::exception& e) {
    r.status = {TrialStatusKind::MODULE_ERROR, e.what()};
  }
  return r;
}

}  // namespace albench
