#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "albench/kernel.hpp"
#include "albench/kmeans.hpp"
#include "albench/qp.hpp"
#include "albench/strategy.hpp"

namespace albench {

// ---------------------------------------------------------------- uniform

// Uniform draw from the whole unlabeled pool.
inline std::size_t select_uniform(const StrategyContext& ctx) {
  return ctx.u_index[uniform_index(*ctx.rng, ctx.u_index.size())];
}

// ---------------------------------------------------------------- uncertainty

inline std::size_t select_us(const StrategyContext& ctx, UncertaintyMeasure measure) {
  TrainedModel model = fit_query_model(ctx);
  return ctx.u_index[argmax_first(uncertainty_scores(model, ctx.X_u, measure))];
}

// ---------------------------------------------------------------- QBC

inline std::vector<LearnerSpec> default_committee() {
  return {LearnerSpec::lr(1.0), LearnerSpec::svm_linear(), LearnerSpec::svm_rbf(), LearnerSpec::lda()};
}

// Vote entropy sum_y -(V_y/K) log(V_y/K) of each column of votes.
inline Vector vote_entropy(const std::vector<Labels>& votes) {
  const std::size_t n = votes.empty() ? 0 : votes.front().size();
  const double K = static_cast<double>(votes.size());
  Vector s(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double pos = 0;
    for (const auto& v : votes) pos += v[i] > 0;
    s[static_cast<Eigen::Index>(i)] = entropy2(pos / K);
  }
  return s;
}

// Members that fail to fit are dropped; with fewer than two left the
// choice is a uniform draw.
inline std::size_t select_qbc(const StrategyContext& ctx, const std::vector<LearnerSpec>& committee) {
  std::vector<Labels> votes;
  for (const auto& spec : committee) {
    try {
      votes.push_back(train(spec, ctx.X_l, ctx.y_l).predict(ctx.X_u));
    } catch (const std::exception&) {
    }
  }
  if (votes.size() < 2) return select_uniform(ctx);
  return ctx.u_index[argmax_first(vote_entropy(votes))];
}

// ---------------------------------------------------------------- EER

enum class EerLoss { ZERO_ONE, LOG };

inline double eer_point_loss(double p_pos, EerLoss loss) {
  return loss == EerLoss::ZERO_ONE ? 1.0 - std::max(p_pos, 1.0 - p_pos) : entropy2(p_pos);
}

// E(x) = sum_y p(y|x) * mean loss over the evaluation subsample of D_u\{x}
// after refitting on D_l + (x, y). Candidates and evaluation points are
// subsampled to the caps; the smallest E wins.
inline std::size_t select_eer(const StrategyContext& ctx, EerLoss loss = EerLoss::ZERO_ONE, std::size_t candidate_cap = 250,
                              std::size_t eval_cap = 500) {
  const std::size_t u = ctx.u_index.size();
  if (u == 1) return ctx.u_index[0];
  auto subsample = [&](std::size_t cap) {
    IndexList pos;
    if (u > cap) {
      pos = sample_without_replacement(u, cap, *ctx.rng);
      std::sort(pos.begin(), pos.end());
    } else {
      pos.resize(u);
      std::iota(pos.begin(), pos.end(), std::size_t{0});
    }
    return pos;
  };
  IndexList candidates = subsample(candidate_cap);
  IndexList eval = subsample(eval_cap);
  Matrix X_eval = select_rows(ctx.X_u, eval);

  TrainedModel base = fit_query_model(ctx);
  Vector p_cand = base.proba_pos(select_rows(ctx.X_u, candidates));

  const Eigen::Index l = ctx.X_l.rows();
  Matrix X_aug(l + 1, ctx.X_l.cols());
  X_aug.topRows(l) = ctx.X_l;
  Labels y_aug = ctx.y_l;
  y_aug.push_back(0);

  double best = std::numeric_limits<double>::infinity();
  std::size_t best_pos = u;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const std::size_t cu = candidates[c];
    X_aug.row(l) = ctx.X_u.row(static_cast<Eigen::Index>(cu));
    double expected = 0.0;
    bool ok = true;
    for (int label : {-1, +1}) {
      y_aug.back() = label;
      double err = 0.0;
      try {
        Vector p = train(ctx.query_model, X_aug, y_aug).proba_pos(X_eval);
        std::size_t cnt = 0;
        for (std::size_t k = 0; k < eval.size(); ++k) {
          if (eval[k] == cu) continue;
          err += eer_point_loss(p[static_cast<Eigen::Index>(k)], loss);
          ++cnt;
        }
        if (cnt) err /= static_cast<double>(cnt);
      } catch (const std::exception&) {
        ok = false;
        break;
      }
      const double py = label > 0 ? p_cand[static_cast<Eigen::Index>(c)] : 1.0 - p_cand[static_cast<Eigen::Index>(c)];
      expected += py * err;
    }
    if (ok && expected < best) {
      best = expected;
      best_pos = cu;
    }
  }
  if (best_pos == u) return select_us(ctx, UncertaintyMeasure::MARGIN);
  return ctx.u_index[best_pos];
}

// ---------------------------------------------------------------- Core-Set

// k-center greedy: the unlabeled point farthest from its nearest labeled one.
inline std::size_t select_coreset(const StrategyContext& ctx) {
  Vector min_d(ctx.X_u.rows());
  for (Eigen::Index i = 0; i < ctx.X_u.rows(); ++i) {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < ctx.X_l.rows(); ++j) m = std::min(m, (ctx.X_u.row(i) - ctx.X_l.row(j)).squaredNorm());
    min_d[i] = m;
  }
  return ctx.u_index[argmax_first(min_d)];
}

// ---------------------------------------------------------------- Graph density

struct DensityGraph {
  std::vector<std::vector<std::size_t>> neighbors;  // positions, k nearest
  Vector density;
};

// k-NN graph (k = min(10, n-1)) with Gaussian weights exp(-gamma ||xi-xj||^2);
// density(i) is the mean weight to i's neighbors.
inline DensityGraph build_density_graph(const Matrix& X, double gamma) {
  const auto n = static_cast<std::size_t>(X.rows());
  const std::size_t k = std::min<std::size_t>(10, n ? n - 1 : 0);
  Matrix D = squared_distances(X, X);
  DensityGraph g;
  g.neighbors.resize(n);
  g.density = Vector::Zero(static_cast<Eigen::Index>(n));
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), [&](std::size_t a, std::size_t b) {
      double da = D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a));
      double db = D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
      return da < db || (da == db && a < b);
    });
    g.neighbors[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    double sum = 0.0;
    for (auto j : g.neighbors[i]) sum += std::exp(-gamma * D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    g.density[static_cast<Eigen::Index>(i)] = k ? sum / static_cast<double>(k) : 0.0;
  }
  return g;
}

// Diversity sampling on a density graph built once per trial over the
// initial unlabeled pool. After each pick the neighbors' densities are
// reduced by the picked node's density, which spreads later queries out.
class GraphDensityStrategy final : public QueryStrategy {
 public:
  std::size_t select(const StrategyContext& ctx) override {
    bool stale = density_.empty();
    for (auto idx : ctx.u_index) stale = stale || !density_.count(idx);
    if (stale) rebuild(ctx);
    std::size_t best = ctx.u_index[0];
    double best_v = -std::numeric_limits<double>::infinity();
    for (auto idx : ctx.u_index) {
      double v = density_.at(idx);
      if (v > best_v) {
        best_v = v;
        best = idx;
      }
    }
    const double picked = density_[best];
    for (auto nb : neighbors_[best])
      if (auto it = density_.find(nb); it != density_.end()) it->second -= picked;
    density_.erase(best);
    return best;
  }
  void reset() override {
    density_.clear();
    neighbors_.clear();
  }

 private:
  void rebuild(const StrategyContext& ctx) {
    reset();
    auto g = build_density_graph(ctx.X_u, 1.0 / static_cast<double>(ctx.X_u.cols()));
    for (std::size_t i = 0; i < ctx.u_index.size(); ++i) {
      density_[ctx.u_index[i]] = g.density[static_cast<Eigen::Index>(i)];
      auto& nb = neighbors_[ctx.u_index[i]];
      for (auto j : g.neighbors[i]) nb.push_back(ctx.u_index[j]);
    }
  }

  std::map<std::size_t, double> density_;
  std::map<std::size_t, std::vector<std::size_t>> neighbors_;
};

// ---------------------------------------------------------------- DWUS

// Mean Gaussian kernel density over the rows of X with the median pairwise
// distance as bandwidth.
inline Vector kernel_density(const Matrix& X) {
  const Eigen::Index n = X.rows();
  Matrix D = squared_distances(X, X);
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) dists.push_back(std::sqrt(D(i, j)));
  double h = 1.0;
  if (!dists.empty()) {
    auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    if (*mid > 0.0) h = *mid;
  }
  Vector dens(n);
  for (Eigen::Index i = 0; i < n; ++i) dens[i] = (-D.row(i).array() / (2.0 * h * h)).exp().mean();
  return dens;
}

// Uncertainty (1 - |p+ - p-|, kept nonnegative so the product ranks
// correctly) times density.
inline Vector dwus_scores(const Vector& p_pos, const Vector& density) {
  Vector s(p_pos.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = (1.0 - std::abs(2.0 * p_pos[i] - 1.0)) * density[i];
  return s;
}

inline std::size_t select_dwus(const StrategyContext& ctx) {
  TrainedModel model = fit_query_model(ctx);
  return ctx.u_index[argmax_first(dwus_scores(model.proba_pos(ctx.X_u), kernel_density(ctx.X_u)))];
}

// ---------------------------------------------------------------- MCM

// In-margin points (|f| < 1) are clustered; the one closest to its own
// center is returned (ties: smaller |f|, then lower index). Without any
// in-margin point, the smallest |f| wins.
inline std::size_t select_mcm(const StrategyContext& ctx, std::size_t k_clusters = 10) {
  TrainedModel model = fit_query_model(ctx);
  Vector f = model.decision(ctx.X_u);
  IndexList margin;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    if (std::abs(f[i]) < 1.0) margin.push_back(static_cast<std::size_t>(i));
  if (margin.empty()) return ctx.u_index[argmin_first(f.cwiseAbs())];
  Matrix M = select_rows(ctx.X_u, margin);
  auto km = kmeans(M, std::min(k_clusters, margin.size()), *ctx.rng);
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity(), best_f = best_d;
  for (std::size_t k = 0; k < margin.size(); ++k) {
    double dist = (M.row(static_cast<Eigen::Index>(k)) - km.centers.row(static_cast<Eigen::Index>(km.assignment[k]))).squaredNorm();
    double af = std::abs(f[static_cast<Eigen::Index>(margin[k])]);
    if (dist < best_d || (dist == best_d && af < best_f)) {
      best_d = dist;
      best_f = af;
      best = k;
    }
  }
  return ctx.u_index[margin[best]];
}

// ---------------------------------------------------------------- InfoDiv

// Per-cluster caps ceil(B * size_c / total): a cluster may contribute while
// its share of the batch stays below its share of the pool.
inline std::vector<std::size_t> infodiv_quotas(const std::vector<std::size_t>& sizes, std::size_t B) {
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  std::vector<std::size_t> q(sizes.size());
  for (std::size_t c = 0; c < sizes.size(); ++c) q[c] = (B * sizes[c] + total - 1) / total;
  return q;
}

// Smallest-margin points, walked in uncertainty order, accepted while their
// cluster is under quota. Returns B original indices.
inline IndexList select_infodiv(const StrategyContext& ctx, std::size_t B, std::size_t k_clusters = 10) {
  const std::size_t u = ctx.u_index.size();
  B = std::min(B, u);
  TrainedModel model = fit_query_model(ctx);
  Vector score = uncertainty_scores(model, ctx.X_u, UncertaintyMeasure::MARGIN);
  auto km = kmeans(ctx.X_u, std::min(k_clusters, u), *ctx.rng);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(km.centers.rows()), 0);
  for (auto a : km.assignment) ++sizes[a];
  auto quota = infodiv_quotas(sizes, B);

  std::vector<std::size_t> order(u);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return score[static_cast<Eigen::Index>(a)] > score[static_cast<Eigen::Index>(b)];
  });
  IndexList out;
  std::vector<std::size_t> used(sizes.size(), 0);
  std::vector<bool> taken(u, false);
  for (auto i : order) {
    if (out.size() == B) break;
    auto c = km.assignment[i];
    if (used[c] < quota[c]) {
      ++used[c];
      taken[i] = true;
      out.push_back(ctx.u_index[i]);
    }
  }
  for (auto i : order) {
    if (out.size() == B) break;
    if (!taken[i]) out.push_back(ctx.u_index[i]);
  }
  return out;
}

// ---------------------------------------------------------------- BMDR / SPAL

struct BmdrProblem {
  Matrix H;  // beta * K_UU (stabilized)
  Vector g;  // linear term
  double lipschitz = 0.0;
  double kernel_epsilon = 0.0;

  double objective(const Vector& a) const { return 0.5 * a.dot(H * a) + g.dot(a); }
};

// Alternating scheme, first half: kernel ridge w on D_l, then the QP in
// alpha with the discriminative costs (w'phi)^2 + 2|w'phi| and the
// beta-weighted representative terms.
inline BmdrProblem build_bmdr_problem(const StrategyContext& ctx, double beta, double lambda, double b) {
  const Eigen::Index l = ctx.X_l.rows(), u = ctx.X_u.rows();
  const double n = static_cast<double>(l + u);
  const double gamma = 1.0 / static_cast<double>(ctx.X_u.cols());
  Matrix K_LL = rbf_gram(ctx.X_l, gamma);
  Matrix K_LU = rbf_kernel(ctx.X_l, ctx.X_u, gamma);
  auto stab = stabilize_kernel(rbf_gram(ctx.X_u, gamma));

  Vector yl(l);
  for (Eigen::Index i = 0; i < l; ++i) yl[i] = ctx.y_l[static_cast<std::size_t>(i)];
  Matrix R = K_LL;
  R.diagonal().array() += lambda;
  Vector c = R.ldlt().solve(yl);
  Vector f = K_LU.transpose() * c;

  BmdrProblem p;
  p.H = beta * stab.K;
  p.lipschitz = beta * stab.max_eigenvalue;
  p.kernel_epsilon = stab.epsilon;
  Vector rep = ((static_cast<double>(u) - b) / n) * K_LU.colwise().sum().transpose() -
               ((static_cast<double>(l) + b) / n) * stab.K.colwise().sum().transpose();
  p.g = beta * rep;
  for (Eigen::Index j = 0; j < u; ++j) p.g[j] += f[j] * f[j] + 2.0 * std::abs(f[j]);
  return p;
}

struct BmdrSelection {
  std::size_t index;
  Vector alpha;
  double objective = 0.0;
};

// How the single query is read off the relaxed alpha. VERTEX rounds to the
// feasible one-hot point (alpha_j = b / e_j <= 1) with the lowest objective,
// ties to larger alpha; ARGMAX takes the largest alpha. The two disagree on
// a few percent of random instances, and only VERTEX solves the b = 1
// integer problem exactly. Without a feasible vertex, VERTEX acts as ARGMAX.
enum class BmdrExtraction { VERTEX, ARGMAX };

// SPAL generalizes the BMDR constraint 1'a = b to e'a = b.
inline BmdrSelection select_spal_detail(const StrategyContext& ctx, double beta, double lambda, double b, const Vector& e,
                                        BmdrExtraction extraction = BmdrExtraction::VERTEX) {
  if (e.size() != ctx.X_u.rows() || (e.array() <= 0).any()) throw std::invalid_argument("spal: weights must be positive, one per candidate");
  const double bb = std::min(b, e.sum());
  BmdrProblem p = build_bmdr_problem(ctx, beta, lambda, bb);
  auto sol = solve_box_qp(p.H, p.g, e, bb, p.lipschitz);
  std::size_t pick = argmax_first(sol.alpha);
  if (extraction == BmdrExtraction::VERTEX) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < e.size(); ++j) {
      const double a = bb / e[j];
      if (a > 1.0) continue;
      const double v = 0.5 * a * a * p.H(j, j) + a * p.g[j];
      if (v < best || (v == best && sol.alpha[j] > sol.alpha[static_cast<Eigen::Index>(pick)])) {
        best = v;
        pick = static_cast<std::size_t>(j);
      }
    }
  }
  return {ctx.u_index[pick], sol.alpha, p.objective(sol.alpha)};
}

inline std::size_t select_spal(const StrategyContext& ctx, double beta, double lambda, double b, const Vector& e) {
  return select_spal_detail(ctx, beta, lambda, b, e).index;
}

inline std::size_t select_bmdr(const StrategyContext& ctx, double beta = 1000.0, double lambda = 1.0, double b = 1.0) {
  return select_spal(ctx, beta, lambda, b, Vector::Ones(ctx.X_u.rows()));
}

// ---------------------------------------------------------------- ALBL

// Exponential-weights selection over arm strategies. Every arm proposes a
// point each round; one arm is drawn from
//   p_a = (1 - explore) * w_a / sum(w) + explore / K
// and its proposal is queried. The reward, observed next round, is the
// importance-weighted accuracy of the query model on the points ALBL
// queried so far (weights 1/q, q = probability the point was proposed).
class AlblStrategy final : public QueryStrategy {
 public:
  AlblStrategy(std::vector<std::unique_ptr<QueryStrategy>> arms, double explore = 0.1, double eta = -1.0)
      : arms_(std::move(arms)), explore_(explore), eta_(eta > 0 ? eta : explore / static_cast<double>(std::max<std::size_t>(1, arms_.size()))) {
    if (arms_.empty()) throw std::invalid_argument("albl: needs at least one arm");
    weights_.assign(arms_.size(), 1.0);
  }

  std::size_t select(const StrategyContext& ctx) override {
    const std::size_t K = arms_.size();
    if (K == 1) return arms_[0]->select(ctx);
    if (pending_) {
      update(ctx);
      pending_ = false;
    }
    std::vector<double> p = probabilities();
    std::vector<std::optional<std::size_t>> choice(K);
    for (std::size_t a = 0; a < K; ++a) {
      try {
        choice[a] = arms_[a]->select(ctx);
      } catch (const std::exception&) {
      }
    }
    double r = uniform_real(*ctx.rng), acc = 0.0;
    std::size_t arm = K - 1;
    for (std::size_t a = 0; a < K; ++a) {
      acc += p[a];
      if (r < acc) {
        arm = a;
        break;
      }
    }
    if (!choice[arm]) {
      // Fall back to the most probable arm that produced a proposal.
      std::optional<std::size_t> alt;
      for (std::size_t a = 0; a < K; ++a)
        if (choice[a] && (!alt || p[a] > p[*alt])) alt = a;
      if (!alt) throw std::runtime_error("albl: every arm failed");
      arm = *alt;
    } else {
      last_arm_ = arm;
      last_p_ = p[arm];
      pending_ = true;
    }
    const std::size_t pick = *choice[arm];
    double q = 0.0;
    for (std::size_t a = 0; a < K; ++a)
      if (choice[a] && *choice[a] == pick) q += p[a];
    queried_.emplace_back(pick, q);
    history_.push_back(arm);
    return pick;
  }

  void reset() override {
    weights_.assign(arms_.size(), 1.0);
    queried_.clear();
    history_.clear();
    pending_ = false;
    for (auto& a : arms_) a->reset();
  }

  std::vector<double> probabilities() const {
    const std::size_t K = arms_.size();
    double sum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    std::vector<double> p(K);
    for (std::size_t a = 0; a < K; ++a) p[a] = (1.0 - explore_) * weights_[a] / sum + explore_ / static_cast<double>(K);
    return p;
  }
  const std::vector<std::size_t>& history() const { return history_; }

  // Importance-weighted accuracy of `model` on the ALBL-queried points.
  double iw_accuracy(const StrategyContext& ctx, const TrainedModel& model) const {
    std::unordered_map<std::size_t, std::size_t> pos;
    for (std::size_t i = 0; i < ctx.l_index.size(); ++i) pos[ctx.l_index[i]] = i;
    double num = 0.0, den = 0.0;
    for (auto [idx, q] : queried_) {
      auto it = pos.find(idx);
      if (it == pos.end() || q <= 0.0) continue;
      Matrix x = ctx.X_l.row(static_cast<Eigen::Index>(it->second));
      double w = 1.0 / q;
      num += w * (model.predict(x)[0] == ctx.y_l[it->second]);
      den += w;
    }
    return den > 0.0 ? num / den : 0.0;
  }

 private:
  void update(const StrategyContext& ctx) {
    TrainedModel model = fit_query_model(ctx);
    apply_reward(iw_accuracy(ctx, model));
  }

 public:
  // Credits `reward` to the arm drawn last round.
  void apply_reward(double reward) {
    weights_[last_arm_] *= std::exp(eta_ * reward / last_p_);
    double mx = *std::max_element(weights_.begin(), weights_.end());
    for (auto& w : weights_) w /= mx;
  }

 private:
  std::vector<std::unique_ptr<QueryStrategy>> arms_;
  double explore_;
  double eta_;
  std::vector<double> weights_;
  std::vector<std::pair<std::size_t, double>> queried_;
  std::vector<std::size_t> history_;
  bool pending_ = false;
  std::size_t last_arm_ = 0;
  double last_p_ = 1.0;
};

}  // namespace albench
