#pragma once

#include <cstdio>
#include <set>

#include "albench/results.hpp"
#include "albench/stats.hpp"

namespace albench {

// Mean accuracy over every recorded round, t = 0 included. The trapezoid
// variant halves the two end points.
inline double aubc(const std::vector<double>& acc, bool trapezoid = false) {
  if (acc.empty()) throw Error("aubc of an empty curve");
  if (!trapezoid || acc.size() == 1) return stats::mean(acc);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < acc.size(); ++i) s += 0.5 * (acc[i] + acc[i + 1]);
  return s / static_cast<double>(acc.size() - 1);
}

struct AnalysisOptions {
  bool trapezoid = false;
  double alpha = 0.05;
  double compat_tolerance = 0.1;  // AUBC points
};

// Everything analysis needs about one cell; AUBC values are fractions.
struct CellData {
  CellSpec spec;
  std::map<std::uint64_t, double> aubc_by_seed;
  std::size_t keep = 0, attempted = 0;
  std::string flag = "OK";  // OK, UNDERFILLED or TLE
  bool usable() const { return flag == "OK" && !aubc_by_seed.empty(); }
};

struct ResultSet {
  Manifest manifest;
  std::vector<CellData> cells;  // sorted by dataset, then label
  const CellData* find(const std::string& ds, const std::string& label) const {
    for (const auto& c : cells)
      if (c.spec.dataset == ds && c.spec.label == label) return &c;
    return nullptr;
  }
  std::vector<std::string> dataset_names() const {
    std::vector<std::string> out;
    for (const auto& c : cells)
      if (out.empty() || out.back() != c.spec.dataset) out.push_back(c.spec.dataset);
    return out;
  }
};

inline std::size_t protocol_keep(const ordered_json& protocol, std::size_t n) {
  const auto& k = protocol.at("keep");
  if (k.is_number()) return k.get<std::size_t>();
  return n < kSmallDatasetLimit ? 100 : 10;
}

// Curves must start at t = 0 and grow D_l by one per round.
inline std::vector<double> curve_accuracies(std::vector<TrialRecord> recs, const std::string& where) {
  std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  std::vector<double> acc;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    if (r.t != i) throw Error(where + ": rounds are not consecutive from t=0");
    if (i > 0 && r.n_labeled != recs[i - 1].n_labeled + 1) throw Error(where + ": n_labeled does not grow by one per round");
    if (!(r.acc >= 0.0 && r.acc <= 1.0)) throw Error(where + ": accuracy outside [0, 1]");
    acc.push_back(r.acc);
  }
  return acc;
}

// Loads one or more results directories. Their manifests must agree on the
// protocol and on dataset contents (ManifestMismatch otherwise).
inline ResultSet load_results(const std::vector<fs::path>& dirs, const AnalysisOptions& opt = {}) {
  if (dirs.empty()) throw Error("no results directory given");
  ResultSet rs;
  std::map<std::pair<std::string, std::string>, CellData> cells;
  for (std::size_t di = 0; di < dirs.size(); ++di) {
    const fs::path& dir = dirs[di];
    Manifest m = read_manifest(dir);
    if (di == 0)
      rs.manifest = m;
    else
      rs.manifest.merge(m);
    std::map<std::pair<std::string, std::string>, std::map<std::uint64_t, TrialStatusKind>> status;
    for (const auto& e : read_checkpoint(dir)) status[{e.dataset, e.strategy}][e.seed] = e.status;
    for (const auto& spec : m.cells) {
      std::pair key{spec.dataset, spec.label};
      if (cells.count(key)) throw Error("cell " + spec.dataset + "/" + spec.label + " appears in more than one results directory");
      const DatasetInfo* info = m.dataset(spec.dataset);
      CellData c;
      c.spec = spec;
      c.keep = protocol_keep(m.protocol, info ? info->n : 0);
      const auto& st = status[key];
      c.attempted = st.size();
      bool tle = false;
      std::set<std::uint64_t> done;
      for (auto [seed, kind] : st) {
        if (kind == TrialStatusKind::DONE) done.insert(seed);
        if (kind == TrialStatusKind::TLE) tle = true;
      }
      fs::path f = dir / cell_file_name(spec.dataset, spec.label);
      if (fs::exists(f)) {
        std::map<std::uint64_t, std::vector<TrialRecord>> by_seed;
        for (auto& r : read_records(f))
          if (done.count(r.seed)) by_seed[r.seed].push_back(std::move(r));
        for (auto& [seed, recs] : by_seed)
          c.aubc_by_seed[seed] = aubc(curve_accuracies(std::move(recs), f.filename().string() + " seed " + std::to_string(seed)), opt.trapezoid);
      }
      if (tle)
        c.flag = "TLE";
      else if (c.aubc_by_seed.size() < c.keep)
        c.flag = "UNDERFILLED";
      cells.emplace(key, std::move(c));
    }
  }
  for (auto& [k, c] : cells) rs.cells.push_back(std::move(c));
  return rs;
}

// ------------------------------------------------------------------ tables

struct SummaryRow {
  std::string dataset, strategy;
  double mean = 0.0, sd = 0.0;  // AUBC points
  std::size_t n = 0;
  std::string flag;
};

inline std::vector<double> values_pct(const CellData& c) {
  std::vector<double> v;
  for (auto [s, a] : c.aubc_by_seed) v.push_back(100.0 * a);
  return v;
}

inline std::vector<SummaryRow> summarize(const ResultSet& rs) {
  std::vector<SummaryRow> out;
  for (const auto& c : rs.cells) {
    SummaryRow r{c.spec.dataset, c.spec.label};
    auto v = values_pct(c);
    r.n = v.size();
    if (!v.empty()) {
      r.mean = stats::mean(v);
      r.sd = stats::sample_sd(v);
    }
    r.flag = c.flag;
    out.push_back(r);
  }
  return out;
}

struct RankRow {
  std::string dataset, strategy;
  double mean_rank = 0.0, sd_rank = 0.0;
  std::size_t n_seeds = 0;
  std::string flag;  // OK, or why the cell is not ranked
};

struct RankTable {
  std::string dataset;
  std::vector<RankRow> rows;
  std::optional<stats::TestResult> friedman;
  std::string note;
};

// Per dataset: usable non-oracle cells ranked per common seed.
inline std::vector<RankTable> rank_tables(const ResultSet& rs) {
  std::vector<RankTable> out;
  for (const auto& ds : rs.dataset_names()) {
    RankTable tab{ds};
    std::vector<const CellData*> ranked;
    for (const auto& c : rs.cells) {
      if (c.spec.dataset != ds || c.spec.label == "bso") continue;
      if (c.usable())
        ranked.push_back(&c);
      else
        tab.rows.push_back({ds, c.spec.label, 0.0, 0.0, c.aubc_by_seed.size(), c.flag == "OK" ? "EMPTY" : c.flag});
    }
    std::vector<std::uint64_t> common;
    if (!ranked.empty()) {
      for (auto [s, a] : ranked[0]->aubc_by_seed) common.push_back(s);
      for (auto* c : ranked) std::erase_if(common, [&](std::uint64_t s) { return !c->aubc_by_seed.count(s); });
    }
    if (ranked.size() >= 2 && common.size() >= 2) {
      std::vector<std::vector<double>> blocks, ranks;
      for (auto s : common) {
        std::vector<double> row;
        for (auto* c : ranked) row.push_back(c->aubc_by_seed.at(s));
        ranks.push_back(stats::descending_ranks(row));
        blocks.push_back(std::move(row));
      }
      for (std::size_t j = 0; j < ranked.size(); ++j) {
        std::vector<double> rj;
        for (const auto& r : ranks) rj.push_back(r[j]);
        tab.rows.push_back({ds, ranked[j]->spec.label, stats::mean(rj), stats::sample_sd(rj), common.size(), "OK"});
      }
      tab.friedman = stats::friedman(blocks);
    } else {
      tab.note = "fewer than 2 strategies sharing 2 seeds";
      for (auto* c : ranked) tab.rows.push_back({ds, c->spec.label, 0.0, 0.0, c->aubc_by_seed.size(), "UNRANKED"});
    }
    std::sort(tab.rows.begin(), tab.rows.end(), [](const auto& a, const auto& b) { return a.strategy < b.strategy; });
    out.push_back(std::move(tab));
  }
  return out;
}

struct Improvement {
  std::string dataset, strategy;
  std::size_t n = 0;
  double mean_tau = 0.0, sd_tau = 0.0;  // AUBC points
  stats::TestResult test;
  bool significant = false;
};

// tau = AUBC(q) - AUBC(uniform) on the seeds both cells hold.
inline std::vector<Improvement> usefulness(const ResultSet& rs, const AnalysisOptions& opt = {}) {
  std::vector<Improvement> out;
  for (const auto& ds : rs.dataset_names()) {
    const CellData* uni = rs.find(ds, "uniform");
    if (!uni || !uni->usable()) continue;
    for (const auto& c : rs.cells) {
      if (c.spec.dataset != ds || &c == uni || c.spec.label == "bso" || !c.usable()) continue;
      std::vector<double> tau;
      for (auto [s, a] : c.aubc_by_seed) {
        auto it = uni->aubc_by_seed.find(s);
        if (it != uni->aubc_by_seed.end()) tau.push_back(100.0 * (a - it->second));
      }
      if (tau.size() < 2) continue;
      Improvement im{ds, c.spec.label, tau.size(), stats::mean(tau), stats::sample_sd(tau), stats::paired_t(tau)};
      im.significant = im.mean_tau > 0.0 && im.test.p < opt.alpha;
      out.push_back(im);
    }
  }
  return out;
}

struct WinCount {
  std::string axis, name;  // axis: "strategy" or "dataset"
  std::size_t wins = 0, tested = 0;
};

inline std::vector<WinCount> usefulness_counts(const std::vector<Improvement>& imps) {
  std::map<std::string, WinCount> by_st, by_ds;
  for (const auto& im : imps) {
    auto& a = by_st.try_emplace(im.strategy, WinCount{"strategy", im.strategy}).first->second;
    auto& b = by_ds.try_emplace(im.dataset, WinCount{"dataset", im.dataset}).first->second;
    ++a.tested;
    ++b.tested;
    if (im.significant) {
      ++a.wins;
      ++b.wins;
    }
  }
  std::vector<WinCount> out;
  for (auto& [k, v] : by_st) out.push_back(v);
  for (auto& [k, v] : by_ds) out.push_back(v);
  return out;
}

struct DatasetTags {
  std::string dim, size, balance;
};

inline DatasetTags dataset_tags(const DatasetInfo& d) {
  return {d.d < 50 ? "LD" : "HD", d.n < 1000 ? "SS" : "LS", d.imbalance_ratio < 1.5 ? "BAL" : "IMB"};
}

struct DeltaEntry {
  std::string dataset, strategy;
  double delta = 0.0;  // AUBC points below the dataset's best
  bool bso_in_max = false;
};

struct DeltaGroup {
  std::string strategy, view, tag;
  std::size_t n = 0, n_without_bso = 0;
  double mean = 0.0, sd = 0.0;
};

struct DeltaViews {
  std::vector<DeltaEntry> entries;
  std::vector<DeltaGroup> groups;
};

inline DeltaViews delta_views(const ResultSet& rs) {
  DeltaViews out;
  for (const auto& ds : rs.dataset_names()) {
    double best = -1.0;
    bool bso = false;
    for (const auto& c : rs.cells)
      if (c.spec.dataset == ds && c.usable()) {
        best = std::max(best, stats::mean(values_pct(c)));
        bso = bso || c.spec.label == "bso";
      }
    for (const auto& c : rs.cells)
      if (c.spec.dataset == ds && c.usable() && c.spec.label != "bso") out.entries.push_back({ds, c.spec.label, best - stats::mean(values_pct(c)), bso});
  }
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<const DeltaEntry*>> groups;
  for (const auto& e : out.entries) {
    const DatasetInfo* info = rs.manifest.dataset(e.dataset);
    if (!info) continue;
    auto t = dataset_tags(*info);
    groups[{e.strategy, "dim", t.dim}].push_back(&e);
    groups[{e.strategy, "size", t.size}].push_back(&e);
    groups[{e.strategy, "balance", t.balance}].push_back(&e);
  }
  for (const auto& [k, es] : groups) {
    DeltaGroup g{std::get<0>(k), std::get<1>(k), std::get<2>(k), es.size()};
    std::vector<double> v;
    for (auto* e : es) {
      v.push_back(e->delta);
      g.n_without_bso += !e->bso_in_max;
    }
    g.mean = stats::mean(v);
    g.sd = stats::sample_sd(v);
    out.groups.push_back(g);
  }
  return out;
}

// Query model x task model grid of mean AUBC for one dataset.
struct CompatMatrix {
  std::string dataset;
  std::vector<std::string> models;                           // rows and columns share this order
  std::vector<std::vector<std::optional<double>>> mean;      // [query][task], AUBC points
  std::vector<std::optional<double>> deficit;                // column max - diagonal
  std::vector<bool> diagonal_is_max;                         // per column, ties count
  std::size_t dominance = 0;                                 // columns whose diagonal is the max
  std::size_t cells_within = 0;                              // cells <= column diagonal + tolerance
  std::size_t holes = 0;
};

inline std::vector<CompatMatrix> compat_matrices(const ResultSet& rs, const AnalysisOptions& opt = {}) {
  std::vector<CompatMatrix> out;
  for (const auto& ds : rs.dataset_names()) {
    std::vector<const CellData*> grid;
    CompatMatrix m{ds};
    for (const auto& c : rs.cells) {
      if (c.spec.dataset != ds || c.spec.query_model.empty() || c.spec.task_model.empty()) continue;
      grid.push_back(&c);
      for (const auto* name : {&c.spec.query_model, &c.spec.task_model})
        if (std::find(m.models.begin(), m.models.end(), *name) == m.models.end()) m.models.push_back(*name);
    }
    if (grid.empty()) continue;
    // Keep the order the grid was requested in: first appearance in the manifest.
    std::vector<std::string> order;
    for (const auto& c : rs.manifest.cells)
      if (c.dataset == ds && !c.query_model.empty() && std::find(order.begin(), order.end(), c.query_model) == order.end()) order.push_back(c.query_model);
    for (const auto& name : m.models)
      if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
    m.models = order;
    const std::size_t k = m.models.size();
    auto idx = [&](const std::string& s) { return static_cast<std::size_t>(std::find(m.models.begin(), m.models.end(), s) - m.models.begin()); };
    m.mean.assign(k, std::vector<std::optional<double>>(k));
    for (auto* c : grid)
      if (!c->aubc_by_seed.empty()) m.mean[idx(c->spec.query_model)][idx(c->spec.task_model)] = stats::mean(values_pct(*c));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) m.holes += !m.mean[i][j];
    m.deficit.assign(k, std::nullopt);
    m.diagonal_is_max.assign(k, false);
    for (std::size_t j = 0; j < k; ++j) {
      const auto& diag = m.mean[j][j];
      if (!diag) continue;
      double mx = *diag;
      for (std::size_t i = 0; i < k; ++i)
        if (m.mean[i][j]) {
          mx = std::max(mx, *m.mean[i][j]);
          m.cells_within += *m.mean[i][j] <= *diag + opt.compat_tolerance;
        }
      m.deficit[j] = mx - *diag;
      m.diagonal_is_max[j] = mx == *diag;
      m.dominance += m.diagonal_is_max[j];
    }
    out.push_back(std::move(m));
  }
  return out;
}

// ------------------------------------------------------------------ output

inline std::string fmt(double v, const char* spec = "%.4f") {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}
inline std::string fmt_p(double p) { return fmt(p, "%.6g"); }

inline std::string csv_header(const ResultSet& rs) { return "# manifest " + rs.manifest.hash() + "\n"; }

inline std::string summary_csv(const ResultSet& rs, const std::vector<SummaryRow>& rows) {
  std::string s = csv_header(rs) + "dataset,strategy,mean_aubc,sd_aubc,n_trials,flag\n";
  for (const auto& r : rows)
    s += r.dataset + "," + r.strategy + "," + (r.n ? fmt(r.mean) : "") + "," + (r.n ? fmt(r.sd) : "") + "," + std::to_string(r.n) + "," + r.flag + "\n";
  return s;
}

inline std::string ranking_csv(const ResultSet& rs, const std::vector<RankTable>& tabs) {
  std::string s = csv_header(rs) + "dataset,strategy,mean_rank,sd_rank,n_seeds,friedman_stat,friedman_p\n";
  for (const auto& t : tabs)
    for (const auto& r : t.rows) {
      const bool ok = r.flag == "OK";
      s += r.dataset + "," + r.strategy + "," + (ok ? fmt(r.mean_rank) : r.flag) + "," + (ok ? fmt(r.sd_rank) : "") + "," + std::to_string(r.n_seeds) + ",";
      s += t.friedman ? fmt(t.friedman->statistic) + "," + fmt_p(t.friedman->p) : ",";
      s += "\n";
    }
  return s;
}

inline std::string usefulness_csv(const ResultSet& rs, const std::vector<Improvement>& imps) {
  std::string s = csv_header(rs) + "dataset,strategy,n_seeds,mean_tau,sd_tau,t,p,significant,degenerate\n";
  for (const auto& i : imps)
    s += i.dataset + "," + i.strategy + "," + std::to_string(i.n) + "," + fmt(i.mean_tau) + "," + fmt(i.sd_tau) + "," + fmt(i.test.statistic) + "," +
         fmt_p(i.test.p) + "," + (i.significant ? "1" : "0") + "," + (i.test.degenerate ? "1" : "0") + "\n";
  return s;
}

inline std::string usefulness_counts_csv(const ResultSet& rs, const std::vector<WinCount>& counts) {
  std::string s = csv_header(rs) + "axis,name,wins,tested\n";
  for (const auto& c : counts) s += c.axis + "," + c.name + "," + std::to_string(c.wins) + "," + std::to_string(c.tested) + "\n";
  return s;
}

inline std::string delta_csv(const ResultSet& rs, const DeltaViews& dv) {
  std::string s = csv_header(rs) + "strategy,view,tag,n_datasets,n_without_bso,mean_delta,sd_delta\n";
  for (const auto& g : dv.groups)
    s += g.strategy + "," + g.view + "," + g.tag + "," + std::to_string(g.n) + "," + std::to_string(g.n_without_bso) + "," + fmt(g.mean) + "," + fmt(g.sd) + "\n";
  return s;
}

inline std::string compat_csv(const ResultSet& rs, const CompatMatrix& m) {
  std::string s = csv_header(rs) + "query_model";
  for (const auto& t : m.models) s += "," + t;
  s += "\n";
  for (std::size_t i = 0; i < m.models.size(); ++i) {
    s += m.models[i];
    for (const auto& v : m.mean[i]) s += "," + (v ? fmt(*v) : std::string("NA"));
    s += "\n";
  }
  s += "diagonal_deficit";
  for (const auto& d : m.deficit) s += "," + (d ? fmt(*d) : std::string("NA"));
  s += "\ndiagonal_is_max";
  for (bool b : m.diagonal_is_max) s += b ? ",1" : ",0";
  s += "\n";
  return s;
}

inline ordered_json analysis_json(const ResultSet& rs, const std::vector<SummaryRow>& summary, const std::vector<RankTable>& ranks,
                                  const std::vector<Improvement>& imps, const std::vector<WinCount>& counts, const DeltaViews& dv,
                                  const std::vector<CompatMatrix>& compat, const AnalysisOptions& opt) {
  ordered_json j;
  j["manifest"] = rs.manifest.hash();
  j["aubc"] = opt.trapezoid ? "trapezoid" : "mean";
  j["units"] = "AUBC points (percent)";
  j["summary"] = ordered_json::array();
  for (const auto& r : summary)
    j["summary"].push_back({{"dataset", r.dataset}, {"strategy", r.strategy}, {"mean_aubc", r.mean}, {"sd_aubc", r.sd}, {"n_trials", r.n}, {"flag", r.flag}});
  j["ranking"] = ordered_json::array();
  for (const auto& t : ranks) {
    ordered_json e{{"dataset", t.dataset}};
    if (t.friedman) e["friedman"] = {{"statistic", t.friedman->statistic}, {"p", t.friedman->p}};
    if (!t.note.empty()) e["note"] = t.note;
    e["rows"] = ordered_json::array();
    for (const auto& r : t.rows)
      e["rows"].push_back({{"strategy", r.strategy}, {"mean_rank", r.mean_rank}, {"sd_rank", r.sd_rank}, {"n_seeds", r.n_seeds}, {"flag", r.flag}});
    j["ranking"].push_back(e);
  }
  j["usefulness"] = ordered_json::array();
  for (const auto& i : imps)
    j["usefulness"].push_back({{"dataset", i.dataset}, {"strategy", i.strategy}, {"n_seeds", i.n}, {"mean_tau", i.mean_tau}, {"sd_tau", i.sd_tau},
                               {"t", std::isfinite(i.test.statistic) ? ordered_json(i.test.statistic) : ordered_json(fmt(i.test.statistic))}, {"p", i.test.p}, {"significant", i.significant}, {"degenerate", i.test.degenerate}});
  j["usefulness_counts"] = ordered_json::array();
  for (const auto& c : counts) j["usefulness_counts"].push_back({{"axis", c.axis}, {"name", c.name}, {"wins", c.wins}, {"tested", c.tested}});
  j["delta"] = ordered_json::array();
  for (const auto& e : dv.entries) j["delta"].push_back({{"dataset", e.dataset}, {"strategy", e.strategy}, {"delta", e.delta}, {"bso_in_max", e.bso_in_max}});
  j["delta_views"] = ordered_json::array();
  for (const auto& g : dv.groups)
    j["delta_views"].push_back({{"strategy", g.strategy}, {"view", g.view}, {"tag", g.tag}, {"n_datasets", g.n}, {"n_without_bso", g.n_without_bso},
                                {"mean_delta", g.mean}, {"sd_delta", g.sd}});
  j["datasets"] = ordered_json::array();
  for (const auto& d : rs.manifest.datasets) {
    auto t = dataset_tags(d);
    j["datasets"].push_back({{"name", d.name}, {"n", d.n}, {"d", d.d}, {"imbalance_ratio", d.imbalance_ratio}, {"tags", {t.dim, t.size, t.balance}}});
  }
  j["compat"] = ordered_json::array();
  for (const auto& m : compat) {
    ordered_json e{{"dataset", m.dataset}, {"models", m.models}};
    e["mean"] = ordered_json::array();
    for (const auto& row : m.mean) {
      ordered_json r = ordered_json::array();
      for (const auto& v : row) r.push_back(v ? ordered_json(*v) : ordered_json(nullptr));
      e["mean"].push_back(r);
    }
    e["diagonal_deficit"] = ordered_json::array();
    for (const auto& d : m.deficit) e["diagonal_deficit"].push_back(d ? ordered_json(*d) : ordered_json(nullptr));
    e["dominance"] = m.dominance;
    e["cells_within_tolerance"] = m.cells_within;
    e["tolerance"] = opt.compat_tolerance;
    e["holes"] = m.holes;
    j["compat"].push_back(e);
  }
  return j;
}

enum class Table { SUMMARY, RANKING, USEFULNESS, DELTA, COMPAT };

inline Table parse_table(const std::string& s) {
  if (s == "summary") return Table::SUMMARY;
  if (s == "ranking") return Table::RANKING;
  if (s == "usefulness") return Table::USEFULNESS;
  if (s == "delta") return Table::DELTA;
  if (s == "compat") return Table::COMPAT;
  throw Error("unknown table '" + s + "' (expected summary, ranking, usefulness, delta, compat)");
}

// Writes the selected tables into `out`; analysis.json is written whenever
// every table is selected. Returns the file names written.
inline std::vector<std::string> write_analysis(const ResultSet& rs, const fs::path& out, const std::set<Table>& tables, const AnalysisOptions& opt = {}) {
  fs::create_directories(out);
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& text) {
    write_text_atomic(out / name, text);
    written.push_back(name);
  };
  auto summary = summarize(rs);
  auto ranks = rank_tables(rs);
  auto imps = usefulness(rs, opt);
  auto counts = usefulness_counts(imps);
  auto dv = delta_views(rs);
  auto compat = compat_matrices(rs, opt);
  if (tables.count(Table::SUMMARY)) put("summary.csv", summary_csv(rs, summary));
  if (tables.count(Table::RANKING)) put("ranking.csv", ranking_csv(rs, ranks));
  if (tables.count(Table::USEFULNESS)) {
    put("usefulness.csv", usefulness_csv(rs, imps));
    put("usefulness_counts.csv", usefulness_counts_csv(rs, counts));
  }
  if (tables.count(Table::DELTA)) put("delta_views.csv", delta_csv(rs, dv));
  if (tables.count(Table::COMPAT))
    for (const auto& m : compat) put("compat_" + m.dataset + ".csv", compat_csv(rs, m));
  if (tables.size() == 5) put("analysis.json", analysis_json(rs, summary, ranks, imps, counts, dv, compat, opt).dump(2) + "\n");
  return written;
}

}  // namespace albench
