#pragma once

#include <chrono>
#include <map>
#include <optional>

#include "albench/dataset.hpp"
#include "albench/learners.hpp"

namespace albench {

struct BsoOptions {
  std::size_t width = 5;       // W
  std::size_t expansion = 10;  // E
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct BeamState {
  IndexList labeled;   // sorted train positions
  IndexList sequence;  // query order
  std::vector<double> trace;
  double score() const { return trace.back(); }
  double trace_sum() const {
    double s = 0;
    for (double a : trace) s += a;
    return s;
  }
};

struct BsoResult {
  IndexList sequence;
  std::vector<double> curve;  // accuracy at t = 0..|sequence|
  bool truncated = false;
  std::size_t fits = 0;
};

// Test accuracy of the task model per labeled set, memoized.
class SubsetAccuracy {
 public:
  SubsetAccuracy(const Matrix& X, const Labels& y, const Matrix& X_test, const Labels& y_test, LearnerSpec spec)
      : X_(X), y_(y), X_test_(X_test), y_test_(y_test), spec_(spec) {}

  double operator()(const IndexList& sorted_labeled) {
    auto it = cache_.find(sorted_labeled);
    if (it != cache_.end()) return it->second;
    ++fits_;
    TrainedModel m = train(spec_, select_rows(X_, sorted_labeled), select(y_, sorted_labeled), false);
    double acc = m.accuracy(X_test_, y_test_);
    cache_.emplace(sorted_labeled, acc);
    return acc;
  }
  std::size_t fits() const { return fits_; }

 private:
  const Matrix& X_;
  const Labels& y_;
  const Matrix& X_test_;
  const Labels& y_test_;
  LearnerSpec spec_;
  std::map<IndexList, double> cache_;
  std::size_t fits_ = 0;
};

// Beam ordering: higher latest accuracy, then the lexicographically smaller
// labeled set.
inline bool beam_before(const BeamState& a, const BeamState& b) {
  if (a.score() != b.score()) return a.score() > b.score();
  return a.labeled < b.labeled;
}

// Beam search over query sequences scored by test accuracy. Each state
// proposes its E best one-point additions (ties to the smaller index);
// states reaching the same labeled set merge, keeping the larger trace sum;
// the W best survive each round.
inline BsoResult bso_run(const Matrix& X_train, const Labels& y_train, const Matrix& X_test, const Labels& y_test, const LearnerSpec& task,
                         const PoolState& pool0, std::size_t T, const BsoOptions& opt = {}) {
  if (opt.width == 0 || opt.expansion == 0) throw std::invalid_argument("bso: W and E must be >= 1");
  if (T > pool0.unlabeled.size()) throw std::invalid_argument("bso: budget exceeds the unlabeled pool");
  SubsetAccuracy acc(X_train, y_train, X_test, y_test, task);

  BeamState root;
  root.labeled = pool0.labeled;
  std::sort(root.labeled.begin(), root.labeled.end());
  root.trace.push_back(acc(root.labeled));
  std::vector<BeamState> beam{root};
  BsoResult out;

  for (std::size_t t = 0; t < T; ++t) {
    if (opt.deadline && std::chrono::steady_clock::now() > *opt.deadline) {
      out.truncated = true;
      break;
    }
    std::map<IndexList, BeamState> next;
    for (const auto& s : beam) {
      std::vector<std::pair<double, std::size_t>> scored;
      for (auto u : pool0.unlabeled) {
        if (std::binary_search(s.labeled.begin(), s.labeled.end(), u)) continue;
        IndexList l = s.labeled;
        l.insert(std::upper_bound(l.begin(), l.end(), u), u);
        scored.emplace_back(acc(l), u);
      }
      std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
      if (scored.size() > opt.expansion) scored.resize(opt.expansion);
      for (auto [a, u] : scored) {
        BeamState c;
        c.labeled = s.labeled;
        c.labeled.insert(std::upper_bound(c.labeled.begin(), c.labeled.end(), u), u);
        c.sequence = s.sequence;
        c.sequence.push_back(u);
        c.trace = s.trace;
        c.trace.push_back(a);
        auto it = next.find(c.labeled);
        if (it == next.end()) {
          next.emplace(c.labeled, std::move(c));
        } else {
          double cs = c.trace_sum(), is = it->second.trace_sum();
          if (cs > is || (cs == is && c.sequence < it->second.sequence)) it->second = std::move(c);
        }
      }
    }
    beam.clear();
    for (auto& [k, s] : next) beam.push_back(std::move(s));
    std::sort(beam.begin(), beam.end(), beam_before);
    if (beam.size() > opt.width) beam.resize(opt.width);
  }
  const BeamState& best = *std::min_element(beam.begin(), beam.end(), beam_before);
  out.sequence = best.sequence;
  out.curve = best.trace;
  out.fits = acc.fits();
  return out;
}

}  // namespace albench
