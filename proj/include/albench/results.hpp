#pragma once

#include <openssl/sha.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "albench/engine.hpp"

namespace albench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// Raised when result directories (or a rerun) disagree on the protocol.
struct ManifestMismatch : Error {
  using Error::Error;
};

inline std::string to_hex(const unsigned char* p, std::size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    s += digits[p[i] >> 4];
    s += digits[p[i] & 15];
  }
  return s;
}

inline std::string sha1_hex(std::string_view data) {
  unsigned char md[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md);
  return to_hex(md, SHA_DIGEST_LENGTH);
}

// Same digest `git hash-object` gives for a file with these bytes.
inline std::string git_blob_hash(std::string_view content) {
  std::string s = "blob " + std::to_string(content.size());
  s.push_back('\0');
  s.append(content);
  return sha1_hex(s);
}

// Hash of the canonical text form, so equal data hash equally whatever
// file formatting it came from.
inline std::string content_hash(const Dataset& ds) {
  std::ostringstream os;
  write_sparse_dataset(os, ds);
  return git_blob_hash(os.str());
}

// ------------------------------------------------------------------ records

inline std::string record_to_json(const TrialRecord& r) {
  ordered_json j;
  j["dataset"] = r.dataset;
  j["strategy"] = r.strategy;
  j["seed"] = r.seed;
  j["t"] = r.t;
  j["queried"] = r.queried;
  j["n_labeled"] = r.n_labeled;
  j["acc"] = r.acc;
  j["wall_ms"] = r.wall_ms;
  return j.dump();
}

inline TrialRecord record_from_json(const std::string& line) {
  auto j = nlohmann::json::parse(line);
  TrialRecord r;
  r.dataset = j.at("dataset").get<std::string>();
  r.strategy = j.at("strategy").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.t = j.at("t").get<std::size_t>();
  r.queried = j.at("queried").get<long long>();
  r.n_labeled = j.at("n_labeled").get<std::size_t>();
  r.acc = j.at("acc").get<double>();
  r.wall_ms = j.at("wall_ms").get<double>();
  return r;
}

inline std::string cell_file_name(const std::string& dataset, const std::string& strategy) { return dataset + "__" + strategy + ".jsonl"; }

inline std::vector<TrialRecord> read_records(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open " + file.string());
  std::vector<TrialRecord> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(record_from_json(line));
  return out;
}

// ------------------------------------------------------------------ manifest

struct DatasetInfo {
  std::string name;
  std::string content_hash;
  std::size_t n = 0, d = 0;
  double imbalance_ratio = 1.0;
};

inline DatasetInfo describe(const Dataset& ds) { return {ds.name, content_hash(ds), ds.n(), ds.d(), imbalance_ratio(ds)}; }

// Settings every record in a results directory shares.
inline ordered_json protocol_json(const ExperimentConfig& c) {
  ordered_json p;
  p["tool_version"] = ALBENCH_VERSION;
  p["test_fraction"] = c.test_fraction;
  p["init_labeled"] = c.init_labeled;
  p["budget"] = c.budget ? ordered_json(*c.budget) : ordered_json("full");
  p["keep"] = c.keep ? ordered_json(*c.keep) : ordered_json("size_class");
  p["attempts"] = c.attempts ? ordered_json(*c.attempts) : ordered_json("size_class");
  p["task_model"] = c.task_model.to_string();
  p["query_model"] = c.query_model ? c.query_model->to_string() : "per_strategy";
  p["base_seed"] = c.base_seed;
  p["trial_timeout_s"] = c.trial_timeout_s;
  p["cell_timeout_s"] = c.cell_timeout_s;
  p["record_timing"] = c.record_timing;
  const auto& o = c.strategy_options;
  p["eer"] = {{"loss", o.eer_loss == EerLoss::ZERO_ONE ? "zero_one" : "log"}, {"candidate_cap", o.eer_candidate_cap}, {"eval_cap", o.eer_eval_cap}};
  p["k_clusters"] = o.k_clusters;
  p["bmdr"] = {{"beta", o.bmdr_beta}, {"lambda", o.bmdr_lambda}, {"b", o.bmdr_b}};
  p["albl_explore"] = o.albl_explore;
  p["bso"] = {{"width", c.bso_width}, {"expansion", c.bso_expansion}, {"force", c.bso_force}};
  return p;
}

inline const std::vector<std::string>& deviations() {
  static const std::vector<std::string> d = {
      "albl arms: us-c, us-nc, uniform (uniform replaces hintsvm)",
      "coreset: k-center greedy on standardized features",
      "bmdr/spal: relaxed alpha rounded to the best feasible one-hot vertex",
      "infodiv: per-cluster caps ceil(B*size/|U|)",
      "split and initial pool seeds exclude the strategy name",
  };
  return d;
}

// One output file. `label` names the file and is the strategy name for
// plain runs; model-grid cells carry their model pair as well.
struct CellSpec {
  std::string dataset;
  std::string label;
  std::string query_model;  // empty: protocol default
  std::string task_model;   // empty: protocol default
  bool operator==(const CellSpec&) const = default;
};

struct Manifest {
  ordered_json protocol;
  std::vector<DatasetInfo> datasets;
  std::vector<CellSpec> cells;

  std::string protocol_hash() const { return sha1_hex(protocol.dump()); }

  ordered_json to_json() const {
    ordered_json j;
    j["protocol"] = protocol;
    j["protocol_hash"] = protocol_hash();
    j["datasets"] = ordered_json::array();
    for (const auto& d : datasets)
      j["datasets"].push_back({{"name", d.name}, {"content_hash", d.content_hash}, {"n", d.n}, {"d", d.d}, {"imbalance_ratio", d.imbalance_ratio}});
    j["cells"] = ordered_json::array();
    for (const auto& c : cells) {
      ordered_json cj = {{"dataset", c.dataset}, {"strategy", c.label}};
      if (!c.query_model.empty()) cj["query_model"] = c.query_model;
      if (!c.task_model.empty()) cj["task_model"] = c.task_model;
      j["cells"].push_back(cj);
    }
    j["deviations"] = deviations();
    return j;
  }

  // Identifies the whole results set; written at the top of every table.
  std::string hash() const { return sha1_hex(to_json().dump()); }

  static Manifest from_json(const ordered_json& j) {
    Manifest m;
    m.protocol = j.at("protocol");
    for (const auto& d : j.at("datasets"))
      m.datasets.push_back({d.at("name").get<std::string>(), d.at("content_hash").get<std::string>(), d.at("n").get<std::size_t>(),
                            d.at("d").get<std::size_t>(), d.at("imbalance_ratio").get<double>()});
    for (const auto& c : j.at("cells"))
      m.cells.push_back({c.at("dataset").get<std::string>(), c.at("strategy").get<std::string>(), c.value("query_model", std::string()),
                         c.value("task_model", std::string())});
    return m;
  }

  const DatasetInfo* dataset(const std::string& name) const {
    for (const auto& d : datasets)
      if (d.name == name) return &d;
    return nullptr;
  }

  // Adds datasets and cells from `other`; protocols and dataset contents
  // must agree.
  void merge(const Manifest& other) {
    if (other.protocol_hash() != protocol_hash()) throw ManifestMismatch("protocol differs from the existing manifest");
    for (const auto& d : other.datasets) {
      if (const auto* mine = dataset(d.name)) {
        if (mine->content_hash != d.content_hash) throw ManifestMismatch("dataset " + d.name + " changed content");
      } else {
        datasets.push_back(d);
      }
    }
    for (const auto& c : other.cells)
      if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
  }
};

inline Manifest read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error("no manifest.json in " + dir.string());
  return Manifest::from_json(ordered_json::parse(in));
}

inline void write_text_atomic(const fs::path& file, const std::string& text) {
  fs::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, file);
}

inline void write_manifest(const fs::path& dir, const Manifest& m) { write_text_atomic(dir / "manifest.json", m.to_json().dump(2) + "\n"); }

// ------------------------------------------------------------------ checkpoint

struct CheckpointEntry {
  std::string dataset, strategy;
  std::uint64_t seed = 0;
  TrialStatusKind status = TrialStatusKind::DONE;
};

inline std::vector<CheckpointEntry> read_checkpoint(const fs::path& dir) {
  std::vector<CheckpointEntry> out;
  std::ifstream in(dir / "checkpoint");
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    CheckpointEntry e;
    std::string st;
    if (ss >> e.dataset >> e.strategy >> e.seed >> st) {
      e.status = parse_status(st);
      out.push_back(e);
    }
  }
  return out;
}

// Owns the output directory: one JSONL file per cell, the manifest, and a
// checkpoint of finished trials. Records are appended before their
// checkpoint line, so after a crash the checkpoint is authoritative and
// stray records are dropped on reopen.
class ResultStore {
 public:
  ResultStore(fs::path dir, const Manifest& manifest) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
    if (fs::exists(dir_ / "manifest.json")) {
      manifest_ = read_manifest(dir_);
      manifest_.merge(manifest);
    } else {
      manifest_ = manifest;
    }
    write_manifest(dir_, manifest_);
    for (const auto& e : read_checkpoint(dir_)) done_[{e.dataset, e.strategy}].emplace(e.seed, e.status);
    repair();
    checkpoint_.open(dir_ / "checkpoint", std::ios::app);
  }

  const Manifest& manifest() const { return manifest_; }
  const fs::path& dir() const { return dir_; }

  // Statuses already on disk for a cell, by seed.
  std::map<std::uint64_t, TrialStatusKind> finished(const std::string& ds, const std::string& st) const {
    auto it = done_.find({ds, st});
    return it == done_.end() ? std::map<std::uint64_t, TrialStatusKind>{} : it->second;
  }

  void commit(const std::string& ds, const std::string& st, std::uint64_t seed, const TrialResult& r) {
    if (r.status.kind == TrialStatusKind::DONE) {
      std::ofstream out(dir_ / cell_file_name(ds, st), std::ios::app | std::ios::binary);
      for (const auto& rec : r.records) out << record_to_json(rec) << '\n';
      out.flush();
      if (!out) throw Error("write failed for " + cell_file_name(ds, st));
    }
    checkpoint_ << ds << '\t' << st << '\t' << seed << '\t' << status_name(r.status.kind) << '\n';
    checkpoint_.flush();
    if (!checkpoint_) throw Error("checkpoint write failed");
    done_[{ds, st}][seed] = r.status.kind;
  }

 private:
  // Keeps only records of checkpointed DONE seeds, in file order.
  void repair() {
    for (const auto& c : manifest_.cells) {
      fs::path f = dir_ / cell_file_name(c.dataset, c.label);
      if (!fs::exists(f)) continue;
      const auto& seeds = done_[{c.dataset, c.label}];
      std::ifstream in(f, std::ios::binary);
      std::string line, kept;
      bool dropped = false;
      while (std::getline(in, line)) {
        bool ok = false;
        if (!in.eof()) try {
            auto r = record_from_json(line);
            auto it = seeds.find(r.seed);
            ok = it != seeds.end() && it->second == TrialStatusKind::DONE;
          } catch (const std::exception&) {
          }
        if (ok)
          kept += line + '\n';
        else
          dropped = true;
      }
      in.close();
      if (dropped) write_text_atomic(f, kept);
    }
  }

  fs::path dir_;
  Manifest manifest_;
  std::map<std::pair<std::string, std::string>, std::map<std::uint64_t, TrialStatusKind>> done_;
  std::ofstream checkpoint_;
};

}  // namespace albench
