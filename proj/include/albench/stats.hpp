#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace albench::stats {

// Regularized lower incomplete gamma P(a, x): series for x < a + 1,
// Lentz continued fraction for Q otherwise.
inline double gamma_p(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma_p: a must be positive");
  if (x <= 0.0) return 0.0;
  const double log_pre = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 1000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return std::exp(log_pre) * sum;
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 1000; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(log_pre) * h;
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

inline double chi2_cdf(double x, double df) { return gamma_p(df / 2.0, x / 2.0); }
inline double chi2_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  // Direct upper tail keeps precision for tiny p.
  const double a = df / 2.0, h = x / 2.0;
  if (h < a + 1.0) return 1.0 - gamma_p(a, h);
  const double tiny = 1e-300;
  double b = h + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, f = d;
  for (int i = 1; i < 1000; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    f *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(a * std::log(h) - h - std::lgamma(a)) * f;
}

namespace detail {
inline double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < 1000; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}
}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double beta_inc(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * detail::beta_cf(a, b, x) / a;
  return 1.0 - std::exp(log_front) * detail::beta_cf(b, a, 1.0 - x) / b;
}

// P(T > t) for Student's t with df degrees of freedom.
inline double t_sf(double t, double df) {
  const double tail = 0.5 * beta_inc(df / 2.0, 0.5, df / (df + t * t));
  return t >= 0.0 ? tail : 1.0 - tail;
}
inline double t_cdf(double t, double df) { return 1.0 - t_sf(t, df); }

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1); 0 for a single value.
inline double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Ranks with 1 = largest value; ties share their average rank.
inline std::vector<double> descending_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double avg = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

struct TestResult {
  double statistic = 0.0;
  double p = 1.0;
  bool degenerate = false;
};

// Friedman chi-square over blocks (rows = seeds, columns = strategies),
// higher values ranked first.
inline TestResult friedman(const std::vector<std::vector<double>>& blocks) {
  const std::size_t N = blocks.size();
  if (N < 2) throw std::invalid_argument("friedman: need at least 2 blocks");
  const std::size_t k = blocks[0].size();
  if (k < 2) throw std::invalid_argument("friedman: need at least 2 treatments");
  std::vector<double> rank_sum(k, 0.0);
  bool all_equal = true;
  for (const auto& row : blocks) {
    if (row.size() != k) throw std::invalid_argument("friedman: ragged blocks");
    auto r = descending_ranks(row);
    for (std::size_t j = 0; j < k; ++j) {
      rank_sum[j] += r[j];
      all_equal = all_equal && row[j] == row[0];
    }
  }
  if (all_equal) return {0.0, 1.0, false};
  double ss = 0.0;
  for (double s : rank_sum) ss += (s / N) * (s / N);
  const double kk = static_cast<double>(k), nn = static_cast<double>(N);
  double stat = 12.0 * nn / (kk * (kk + 1.0)) * ss - 3.0 * nn * (kk + 1.0);
  stat = std::max(stat, 0.0);
  return {stat, chi2_sf(stat, kk - 1.0), false};
}

// One-sided paired t on differences (H1: mean > 0).
inline TestResult paired_t(const std::vector<double>& diffs) {
  if (diffs.size() < 2) throw std::invalid_argument("paired_t: need at least 2 differences");
  const double m = mean(diffs), sd = sample_sd(diffs), n = static_cast<double>(diffs.size());
  if (sd == 0.0) {
    if (m == 0.0) return {0.0, 1.0, false};
    return {m > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity(), m > 0 ? 0.0 : 1.0, true};
  }
  const double t = m / (sd / std::sqrt(n));
  return {t, t_sf(t, n - 1.0), false};
}

}  // namespace albench::stats
