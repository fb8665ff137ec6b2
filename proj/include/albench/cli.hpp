#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "albench/analysis.hpp"
#include "albench/grid.hpp"

namespace albench::cli {

enum ExitCode : int { OK = 0, FAILED = 1, UNKNOWN_STRATEGY = 2, BAD_DATASET = 3, MIXED_MANIFESTS = 4 };

struct Options {
  std::vector<std::string> data;
  std::string manifest;
  std::string strategy;
  std::vector<std::string> strategies;
  std::string query_model, task_model = "svm_rbf";
  std::uint64_t seed = 0;
  std::optional<std::size_t> keep, attempts, budget;
  double test_fraction = 0.4;
  std::size_t init_labeled = 20;
  std::size_t jobs = 1;
  double cell_timeout = 1800.0, trial_timeout = 120.0;
  std::string out;
  bool no_timing = false, force = false, trapezoid = false;
  std::size_t bso_width = 5, bso_expansion = 10;
  std::vector<std::string> tables = {"summary", "ranking", "usefulness", "delta", "compat"};
  std::vector<std::string> models = {"lr", "svm_rbf", "rf"};
  std::vector<std::string> results;
  std::string tables_out;
};

struct DatasetLoadError : Error {
  using Error::Error;
};

inline std::vector<Dataset> load_datasets(const Options& o) {
  std::vector<Dataset> out;
  try {
    if (!o.manifest.empty())
      for (const auto& e : read_dataset_manifest(o.manifest)) out.push_back(load_manifest_entry(e));
    for (const auto& p : o.data) out.push_back(load_sparse_dataset(p, fs::path(p).stem().string()));
  } catch (const std::exception& e) {
    throw DatasetLoadError(e.what());
  }
  if (out.empty()) throw DatasetLoadError("no dataset given (use --data or --manifest)");
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (out[i].name == out[j].name) throw DatasetLoadError("dataset name '" + out[i].name + "' given twice");
  return out;
}

inline ExperimentConfig make_config(const Options& o) {
  ExperimentConfig c;
  c.test_fraction = o.test_fraction;
  c.init_labeled = o.init_labeled;
  c.budget = o.budget;
  c.keep = o.keep;
  c.attempts = o.attempts;
  c.trial_timeout_s = o.trial_timeout;
  c.cell_timeout_s = o.cell_timeout;
  c.task_model = LearnerSpec::parse(o.task_model);
  if (!o.query_model.empty()) c.query_model = LearnerSpec::parse(o.query_model);
  c.base_seed = o.seed;
  c.bso_width = o.bso_width;
  c.bso_expansion = o.bso_expansion;
  c.bso_force = o.force;
  c.record_timing = !o.no_timing;
  return c;
}

inline fs::path out_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("ALBENCH_OUT"); env && *env) return env;
  return "results";
}

inline void check_strategies(const std::vector<std::string>& names) {
  for (const auto& s : names)
    if (!is_strategy(s)) throw UnknownStrategy(s);
}

inline void report(const GridSummary& sum, std::ostream& status) {
  for (const auto& c : sum.cells) {
    status << c.dataset << '/' << c.strategy << ": " << c.flag << " (" << c.kept << " kept of " << c.attempted << " attempted, keep " << c.keep << ")\n";
    for (const auto& [seed, st] : c.failures) status << "  seed " << seed << ' ' << status_name(st.kind) << (st.detail.empty() ? "" : ": " + st.detail) << '\n';
  }
}

inline int cmd_run_grid(const Options& o, const std::vector<std::string>& strategies, bool single, std::ostream& status) {
  check_strategies(strategies);
  auto cfg = make_config(o);
  auto datasets = load_datasets(o);
  if (single && datasets.size() != 1) throw Error("run takes exactly one dataset; use grid for several");
  ResultStore store(out_dir(o), make_manifest(cfg, datasets, strategies));
  auto sum = run_grid(cfg, datasets, strategies, store, o.jobs, &status);
  report(sum, status);
  if (single) return sum.cells.at(0).kept > 0 ? OK : FAILED;
  return OK;
}

inline int cmd_compat(const Options& o, std::ostream& out, std::ostream& status) {
  auto cfg = make_config(o);
  std::vector<LearnerSpec> models;
  for (const auto& m : o.models) models.push_back(LearnerSpec::parse(m));
  auto datasets = load_datasets(o);
  const fs::path dir = out_dir(o);
  ResultStore store(dir, make_compat_manifest(cfg, datasets, models));
  std::vector<CellPlan> plans;
  for (const auto& ds : datasets)
    for (auto& p : compat_plans(cfg, ds, models)) plans.push_back(std::move(p));
  report(run_plans(plans, store, o.jobs, &status), status);
  AnalysisOptions aopt;
  aopt.trapezoid = o.trapezoid;
  auto rs = load_results({dir}, aopt);
  const fs::path tables = o.tables_out.empty() ? dir / "analysis" : fs::path(o.tables_out);
  write_analysis(rs, tables, {Table::COMPAT}, aopt);
  for (const auto& m : compat_matrices(rs, aopt))
    out << m.dataset << ": diagonal is the column maximum in " << m.dominance << " of " << m.models.size() << " columns; " << m.cells_within << " of "
        << m.models.size() * m.models.size() << " cells within " << aopt.compat_tolerance << " points of their column diagonal"
        << (m.holes ? "; " + std::to_string(m.holes) + " missing cells" : "") << '\n';
  return OK;
}

inline int cmd_analyze(const Options& o, std::ostream& out) {
  std::vector<fs::path> dirs(o.results.begin(), o.results.end());
  if (dirs.empty()) dirs.push_back(out_dir(o));
  std::set<Table> tables;
  for (const auto& t : o.tables) tables.insert(parse_table(t));
  AnalysisOptions aopt;
  aopt.trapezoid = o.trapezoid;
  auto rs = load_results(dirs, aopt);
  const fs::path dest = o.tables_out.empty() ? dirs[0] / "analysis" : fs::path(o.tables_out);
  for (const auto& f : write_analysis(rs, dest, tables, aopt)) out << (dest / f).string() << '\n';
  return OK;
}

// Flags override the --config file (key=value lines, keys are long flag
// names); --out overrides ALBENCH_OUT, which overrides "results".
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Pool-based active learning benchmark"};
  app.set_version_flag("--version", std::string(ALBENCH_VERSION));
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--data", o.data, "sparse-format dataset file (repeatable)");
  app.add_option("--manifest", o.manifest, "dataset manifest: name path n d per line");
  app.add_option("--strategy", o.strategy, "strategy for run");
  app.add_option("--strategies", o.strategies, "comma-separated strategies for grid")->delimiter(',');
  app.add_option("--query-model", o.query_model, "query model, e.g. lr:C=0.1 (default per strategy)");
  app.add_option("--task-model", o.task_model, "task model")->capture_default_str();
  app.add_option("--seed", o.seed, "base seed")->capture_default_str();
  app.add_option("--keep", o.keep, "trials kept per cell (default 100 if n < 2000 else 10)");
  app.add_option("--attempts", o.attempts, "trials attempted per cell (default 150 if n < 2000 else 15)");
  app.add_option("--test-fraction", o.test_fraction)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  app.add_option("--init-labeled", o.init_labeled)->capture_default_str();
  app.add_option("--budget", o.budget, "queries per trial (default: the whole unlabeled pool)");
  app.add_option("--jobs", o.jobs)->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--cell-timeout", o.cell_timeout, "seconds")->capture_default_str();
  app.add_option("--trial-timeout", o.trial_timeout, "seconds")->capture_default_str();
  app.add_option("--out", o.out, "results directory (default $ALBENCH_OUT, then ./results)");
  app.add_flag("--no-timing", o.no_timing, "write wall_ms as 0 so reruns are byte-identical");
  app.add_flag("--force", o.force, "allow bso above its dataset size limit");
  app.add_flag("--trapezoid", o.trapezoid, "AUBC by the trapezoid rule instead of the plain mean");
  app.add_option("--bso-width", o.bso_width)->capture_default_str();
  app.add_option("--bso-expansion", o.bso_expansion)->capture_default_str();
  app.add_option("--tables", o.tables, "summary,ranking,usefulness,delta,compat")->delimiter(',');
  app.add_option("--models", o.models, "model list for compat")->delimiter(',');
  app.add_option("--tables-out", o.tables_out, "where analyze writes tables (default <results>/analysis)");

  auto* run = app.add_subcommand("run", "one dataset x one strategy");
  auto* grid = app.add_subcommand("grid", "datasets x strategies");
  auto* analyze = app.add_subcommand("analyze", "tables from results directories");
  analyze->add_option("results", o.results, "results directories (default --out)");
  auto* compat = app.add_subcommand("compat", "uncertainty sampling over query x task models");
  auto* bso = app.add_subcommand("bso", "beam-search oracle on each dataset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? OK : FAILED;
  }

  try {
    if (run->parsed()) {
      if (o.strategy.empty()) throw Error("run needs --strategy");
      return cmd_run_grid(o, {o.strategy}, true, err);
    }
    if (grid->parsed()) {
      auto st = o.strategies;
      if (st.empty() && !o.strategy.empty()) st.push_back(o.strategy);
      if (st.empty()) st = strategy_names();
      return cmd_run_grid(o, st, false, err);
    }
    if (bso->parsed()) return cmd_run_grid(o, {"bso"}, false, err);
    if (compat->parsed()) return cmd_compat(o, out, err);
    if (analyze->parsed()) return cmd_analyze(o, out);
  } catch (const UnknownStrategy& e) {
    err << "unknown strategy '" << e.what() << "'; registered strategies:\n" << strategy_listing();
    return UNKNOWN_STRATEGY;
  } catch (const DatasetLoadError& e) {
    err << "cannot read dataset: " << e.what() << '\n';
    return BAD_DATASET;
  } catch (const ManifestMismatch& e) {
    err << "mixed manifests: " << e.what() << '\n';
    return MIXED_MANIFESTS;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return FAILED;
  }
  return FAILED;
}

}  // namespace albench::cli
