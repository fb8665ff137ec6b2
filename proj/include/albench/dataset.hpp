#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "albench/errors.hpp"
#include "albench/random.hpp"

namespace albench {

// Rows are samples.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;
using IndexList = std::vector<std::size_t>;

struct Dataset {
  std::string name;
  Matrix X;
  Labels y;  // each entry is -1 or +1

  std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(X.cols()); }
};

struct DataSplit {
  IndexList train_idx;  // sorted
  IndexList test_idx;   // sorted
  std::uint64_t seed = 0;
};

// Positions into the training partition.
struct PoolState {
  IndexList labeled;    // sorted
  IndexList unlabeled;  // sorted
};

struct Scaler {
  Vector mean;
  Vector scale;  // population SD, 1 for constant columns

  Matrix transform(const Matrix& X) const {
    Matrix out = X;
    for (Eigen::Index j = 0; j < X.cols(); ++j) out.col(j) = (X.col(j).array() - mean[j]) / scale[j];
    return out;
  }
};

inline Matrix select_rows(const Matrix& X, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

template <typename T>
std::vector<T> select(const std::vector<T>& v, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

inline bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size() && std::isfinite(out);
}

}  // namespace detail

// Parses the sparse `label idx:val ...` format (1-based, strictly increasing
// indices). Labels in {-1,+1} are kept, {0,1} maps 0 to -1.
inline Dataset parse_sparse_dataset(std::istream& in, std::string name = {}) {
  struct Entry {
    std::size_t col;
    double val;
  };
  std::vector<std::vector<Entry>> rows;
  std::vector<double> raw_labels;
  std::size_t d = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    std::size_t pos = 0;
    auto next_token = [&](std::size_t& start) -> std::string_view {
      while (pos < sv.size() && detail::is_space(sv[pos])) ++pos;
      start = pos;
      while (pos < sv.size() && !detail::is_space(sv[pos])) ++pos;
      return sv.substr(start, pos - start);
    };
    std::size_t start = 0;
    std::string_view tok = next_token(start);
    if (tok.empty()) continue;
    double label = 0.0;
    if (!detail::parse_double(tok, label)) throw ParseError(line_no, start + 1, "bad label '" + std::string(tok) + "'");
    std::vector<Entry> row;
    std::size_t last = 0;
    while (true) {
      tok = next_token(start);
      if (tok.empty()) break;
      auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, start + 1, "expected idx:val");
      std::size_t idx = 0;
      auto idx_tok = tok.substr(0, colon);
      auto [p, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
      if (ec != std::errc() || p != idx_tok.data() + idx_tok.size() || idx == 0)
        throw ParseError(line_no, start + 1, "bad index '" + std::string(idx_tok) + "'");
      if (idx <= last) throw ParseError(line_no, start + 1, "index " + std::to_string(idx) + " not increasing");
      double val = 0.0;
      if (!detail::parse_double(tok.substr(colon + 1), val))
        throw ParseError(line_no, start + colon + 2, "bad value '" + std::string(tok.substr(colon + 1)) + "'");
      last = idx;
      d = std::max(d, idx);
      row.push_back({idx - 1, val});
    }
    rows.push_back(std::move(row));
    raw_labels.push_back(label);
  }

  std::set<double> alphabet(raw_labels.begin(), raw_labels.end());
  if (alphabet.size() > 2) throw NotBinaryError("more than two distinct labels");
  bool pm = std::all_of(alphabet.begin(), alphabet.end(), [](double v) { return v == 1.0 || v == -1.0; });
  bool zero_one = std::all_of(alphabet.begin(), alphabet.end(), [](double v) { return v == 1.0 || v == 0.0; });
  if (!pm && !zero_one) throw NotBinaryError("labels must be in {-1,+1} or {0,1}");

  Dataset ds;
  ds.name = std::move(name);
  ds.X = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  ds.y.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& e : rows[i]) ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e.col)) = e.val;
    ds.y[i] = raw_labels[i] > 0.0 ? +1 : -1;
  }
  return ds;
}

inline Dataset load_sparse_dataset(const std::filesystem::path& path, std::string name = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset " + path.string());
  if (name.empty()) name = path.stem().string();
  return parse_sparse_dataset(in, std::move(name));
}

// Writes nonzero entries only, with round-trip precision.
inline void write_sparse_dataset(std::ostream& out, const Dataset& ds) {
  char buf[64];
  for (std::size_t i = 0; i < ds.n(); ++i) {
    out << (ds.y[i] > 0 ? "+1" : "-1");
    for (std::size_t j = 0; j < ds.d(); ++j) {
      double v = ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ' ' << (j + 1) << ':' << buf;
    }
    out << '\n';
  }
}

// Checks the invariants a dataset must satisfy before entering a trial.
inline void validate(const Dataset& ds) {
  if (ds.n() < 2) throw Error("dataset " + ds.name + " has fewer than 2 samples");
  if (ds.d() < 1) throw Error("dataset " + ds.name + " has no features");
  if (!ds.X.allFinite()) throw NumericError("dataset " + ds.name + " has non-finite entries");
}

inline Scaler fit_scaler(const Matrix& train) {
  Scaler s;
  const auto n = static_cast<double>(train.rows());
  s.mean = train.colwise().mean().transpose();
  s.scale.resize(train.cols());
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    if ((train.col(j).array() == train(0, j)).all()) {
      // Constant column: exact mean so it maps to exact zeros.
      s.mean[j] = train(0, j);
      s.scale[j] = 1.0;
      continue;
    }
    double var = (train.col(j).array() - s.mean[j]).square().sum() / n;
    double sd = std::sqrt(var);
    s.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

struct Standardized {
  Matrix train;
  Matrix test;
  Scaler scaler;
};

// Mean removal and unit (population) variance, fit on the training rows only.
inline Standardized standardize(const Matrix& train, const Matrix& test) {
  if (train.rows() == 0) throw std::invalid_argument("standardize: empty training matrix");
  Scaler s = fit_scaler(train);
  Matrix tr = s.transform(train);
  return {std::move(tr), s.transform(test), std::move(s)};
}

inline std::size_t test_size(std::size_t n, double test_fraction) {
  return static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(n) + 0.5));
}

// Plain uniform partition (no stratification).
inline DataSplit split_train_test(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw std::invalid_argument("test_fraction must be in (0,1)");
  Rng rng(seed);
  auto perm = permutation(ds.n(), rng);
  std::size_t n_test = test_size(ds.n(), test_fraction);
  DataSplit split;
  split.seed = seed;
  split.test_idx.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.train_idx.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(split.test_idx.begin(), split.test_idx.end());
  std::sort(split.train_idx.begin(), split.train_idx.end());
  return split;
}

// Samples m labeled positions uniformly without replacement; throws ColdStart
// when the sample holds a single class.
inline PoolState init_pool(std::span<const int> train_labels, std::size_t m, std::uint64_t seed) {
  if (m >= train_labels.size()) throw std::invalid_argument("init_pool: m must be smaller than the training set");
  Rng rng(seed);
  PoolState pool;
  pool.labeled = sample_without_replacement(train_labels.size(), m, rng);
  std::sort(pool.labeled.begin(), pool.labeled.end());
  std::size_t k = 0;
  for (std::size_t i = 0; i < train_labels.size(); ++i) {
    if (k < pool.labeled.size() && pool.labeled[k] == i)
      ++k;
    else
      pool.unlabeled.push_back(i);
  }
  bool pos = false, neg = false;
  for (auto i : pool.labeled) (train_labels[i] > 0 ? pos : neg) = true;
  if (!(pos && neg)) throw ColdStart("initial labeled pool holds a single class");
  return pool;
}

inline std::pair<std::size_t, std::size_t> class_counts(std::span<const int> y) {
  std::size_t pos = 0;
  for (int v : y) pos += v > 0;
  return {pos, y.size() - pos};
}

// Majority count over minority count.
inline double imbalance_ratio(const Dataset& ds) {
  auto [pos, neg] = class_counts(ds.y);
  if (pos == 0 || neg == 0) throw NotBinaryError("imbalance ratio needs both classes");
  return static_cast<double>(std::max(pos, neg)) / static_cast<double>(std::min(pos, neg));
}

struct ManifestEntry {
  std::string name;
  std::filesystem::path path;
  std::size_t expected_n = 0;
  std::size_t expected_d = 0;
};

// One dataset per line: `name path expected_n expected_d`; '#' starts a
// comment. Relative paths resolve against the manifest's directory.
inline std::vector<ManifestEntry> read_dataset_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open manifest " + file.string());
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ss(line);
    ManifestEntry e;
    std::string path;
    if (!(ss >> e.name)) continue;
    if (!(ss >> path >> e.expected_n >> e.expected_d)) throw ParseError(line_no, 1, "manifest line needs: name path n d");
    e.path = path;
    if (e.path.is_relative()) e.path = file.parent_path() / e.path;
    out.push_back(std::move(e));
  }
  return out;
}

inline Dataset load_manifest_entry(const ManifestEntry& e) {
  Dataset ds = load_sparse_dataset(e.path, e.name);
  if (ds.n() != e.expected_n || ds.d() != e.expected_d)
    throw Error("dataset " + e.name + ": expected n=" + std::to_string(e.expected_n) + " d=" + std::to_string(e.expected_d) +
                ", got n=" + std::to_string(ds.n()) + " d=" + std::to_string(ds.d()));
  return ds;
}

}  // namespace albench
