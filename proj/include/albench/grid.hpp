#pragma once

#include <condition_variable>
#include <deque>
#include <mutex>
#include <ostream>
#include <thread>

#include "albench/results.hpp"

namespace albench {

struct CellOutcome {
  std::string dataset, strategy;
  std::size_t kept = 0, attempted = 0, keep = 0;
  std::string flag;  // OK, UNDERFILLED or TLE
  std::vector<std::pair<std::uint64_t, TrialStatus>> failures;
};

struct GridSummary {
  std::vector<CellOutcome> cells;
  bool all_ok() const {
    for (const auto& c : cells)
      if (c.flag != "OK") return false;
    return true;
  }
};

// Minimal blocking queue; close() wakes every waiter.
template <typename T>
class Channel {
 public:
  void push(T v) {
    {
      std::lock_guard lk(m_);
      q_.push_back(std::move(v));
    }
    cv_.notify_one();
  }
  std::optional<T> pop() {
    std::unique_lock lk(m_);
    cv_.wait(lk, [&] { return closed_ || !q_.empty(); });
    if (q_.empty()) return std::nullopt;
    T v = std::move(q_.front());
    q_.pop_front();
    return v;
  }
  void close() {
    {
      std::lock_guard lk(m_);
      closed_ = true;
    }
    cv_.notify_all();
  }

 private:
  std::mutex m_;
  std::condition_variable cv_;
  std::deque<T> q_;
  bool closed_ = false;
};

// One cell to run: trials of `strategy` under `cfg`, stored under `label`.
struct CellPlan {
  const Dataset* ds;
  std::string label;
  std::string strategy;
  ExperimentConfig cfg;
};

// Runs every planned cell. Seeds 0, 1, 2, ... are launched in order and the
// first `keep` DONE trials are retained; results are committed to the store
// strictly in seed order by the calling thread, so the output does not
// depend on `jobs`.
inline GridSummary run_plans(const std::vector<CellPlan>& plans, ResultStore& store, std::size_t jobs = 1, std::ostream* status = nullptr) {
  using clock = std::chrono::steady_clock;
  struct Cell {
    const CellPlan* plan;
    std::size_t keep, attempts;
    std::uint64_t next_seed = 0, commit_seed = 0;
    std::size_t done = 0, outstanding = 0;
    bool tle = false;
    std::optional<clock::time_point> started;
    std::map<std::uint64_t, TrialResult> pending;
    CellOutcome outcome;
  };
  std::vector<Cell> cells;
  for (const auto& plan : plans) {
    Cell c{&plan, plan.cfg.keep_for(plan.ds->n()), plan.cfg.attempts_for(plan.ds->n())};
    for (auto [seed, kind] : store.finished(plan.ds->name, plan.label)) {
      if (seed != c.commit_seed) break;
      ++c.commit_seed;
      if (kind == TrialStatusKind::DONE) ++c.done;
      if (kind == TrialStatusKind::TLE) c.tle = true;
      if (kind != TrialStatusKind::DONE) c.outcome.failures.push_back({seed, {kind, "recorded in checkpoint"}});
    }
    c.next_seed = c.commit_seed;
    cells.push_back(std::move(c));
  }

  struct Task {
    std::size_t cell;
    std::uint64_t seed;
  };
  struct Done {
    std::size_t cell;
    std::uint64_t seed;
    TrialResult result;
  };
  Channel<Task> tasks;
  Channel<Done> results;
  std::size_t in_flight = 0;

  auto schedule = [&](std::size_t id) {
    Cell& c = cells[id];
    while (!c.tle && c.done + c.outstanding < c.keep && c.next_seed < c.attempts) {
      if (!c.started) c.started = clock::now();
      tasks.push({id, c.next_seed++});
      ++c.outstanding;
      ++in_flight;
    }
  };
  auto execute = [&](const Task& t) {
    const CellPlan& p = *cells[t.cell].plan;
    TrialResult r;
    // `started` is written before the task is queued, so reading it here is safe.
    if (std::chrono::duration<double>(clock::now() - *cells[t.cell].started).count() > p.cfg.cell_timeout_s) {
      r.status = {TrialStatusKind::TLE, "cell time limit reached"};
      return Done{t.cell, t.seed, std::move(r)};
    }
    try {
      r = run_trial(p.cfg, *p.ds, p.strategy, t.seed);
      for (auto& rec : r.records) rec.strategy = p.label;
    } catch (const std::exception& e) {
      r.status = {TrialStatusKind::MODULE_ERROR, e.what()};
    }
    return Done{t.cell, t.seed, std::move(r)};
  };

  std::vector<std::thread> workers;
  if (jobs > 1)
    for (std::size_t w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        while (auto t = tasks.pop()) results.push(execute(*t));
      });

  for (std::size_t i = 0; i < cells.size(); ++i) schedule(i);
  try {
    while (in_flight > 0) {
      Done d = [&] {
        if (jobs > 1) return *results.pop();
        return execute(*tasks.pop());
      }();
      --in_flight;
      Cell& c = cells[d.cell];
      c.pending.emplace(d.seed, std::move(d.result));
      for (auto it = c.pending.find(c.commit_seed); it != c.pending.end(); it = c.pending.find(c.commit_seed)) {
        TrialResult r = std::move(it->second);
        c.pending.erase(it);
        --c.outstanding;
        const std::uint64_t seed = c.commit_seed++;
        if (c.done >= c.keep) continue;  // surplus speculative trial
        store.commit(c.plan->ds->name, c.plan->label, seed, r);
        if (r.status.kind == TrialStatusKind::DONE) {
          ++c.done;
        } else {
          if (r.status.kind == TrialStatusKind::TLE) c.tle = true;
          c.outcome.failures.push_back({seed, r.status});
        }
        if (status)
          *status << c.plan->ds->name << '/' << c.plan->label << " seed " << seed << ' ' << status_name(r.status.kind) << " (" << c.done << '/' << c.keep
                  << ")" << (r.status.detail.empty() ? "" : ": " + r.status.detail) << '\n';
      }
      if (c.started && std::chrono::duration<double>(clock::now() - *c.started).count() > c.plan->cfg.cell_timeout_s) c.tle = true;
      schedule(d.cell);
    }
  } catch (...) {
    tasks.close();
    for (auto& w : workers) w.join();
    throw;
  }
  tasks.close();
  for (auto& w : workers) w.join();

  GridSummary summary;
  for (auto& c : cells) {
    CellOutcome o = std::move(c.outcome);
    o.dataset = c.plan->ds->name;
    o.strategy = c.plan->label;
    o.kept = c.done;
    o.keep = c.keep;
    o.attempted = c.commit_seed;
    o.flag = c.done >= c.keep ? "OK" : (c.tle ? "TLE" : "UNDERFILLED");
    summary.cells.push_back(std::move(o));
  }
  return summary;
}

inline GridSummary run_grid(const ExperimentConfig& cfg, const std::vector<Dataset>& datasets, const std::vector<std::string>& strategies,
                            ResultStore& store, std::size_t jobs = 1, std::ostream* status = nullptr) {
  std::vector<CellPlan> plans;
  for (const auto& ds : datasets)
    for (const auto& st : strategies) plans.push_back({&ds, st, st, cfg});
  return run_plans(plans, store, jobs, status);
}

inline Manifest make_manifest(const ExperimentConfig& cfg, const std::vector<Dataset>& datasets, const std::vector<std::string>& strategies) {
  Manifest m;
  m.protocol = protocol_json(cfg);
  for (const auto& ds : datasets) {
    m.datasets.push_back(describe(ds));
    for (const auto& st : strategies) m.cells.push_back({ds.name, st, "", ""});
  }
  return m;
}

// Query-model x task-model grid of uncertainty sampling (margin). Cells
// are labelled `us-c.q-<query>.t-<task>`; the protocol records the task
// model as "grid".
inline std::string compat_label(const LearnerSpec& q, const LearnerSpec& t) { 
  return "us-c.q-" + std::string(kind_name(q.kind)) + ".t-" + std::string(kind_name(t.kind));
}

inline std::vector<CellPlan> compat_plans(const ExperimentConfig& cfg, const Dataset& ds, const std::vector<LearnerSpec>& models) {
  std::vector<CellPlan> plans;
  for (const auto& q : models)
    for (const auto& t : models) {
      ExperimentConfig c = cfg;
      c.query_model = q;
      c.task_model = t;
      plans.push_back({&ds, compat_label(q, t), "us-c", c});
    }
  return plans;
}

inline Manifest make_compat_manifest(const ExperimentConfig& cfg, const std::vector<Dataset>& datasets, const std::vector<LearnerSpec>& models) {
  for (std::size_t i = 0; i < models.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (models[i].kind == models[j].kind) throw Error("compat models must be of distinct kinds");
  Manifest m;
  m.protocol = protocol_json(cfg);
  m.protocol["task_model"] = "grid";
  m.protocol["query_model"] = "grid";
  for (const auto& ds : datasets) {
    m.datasets.push_back(describe(ds));
    for (const auto& q : models)
      for (const auto& t : models) m.cells.push_back({ds.name, compat_label(q, t), q.to_string(), t.to_string()});
  }
  return m;
}

}  // namespace albench
