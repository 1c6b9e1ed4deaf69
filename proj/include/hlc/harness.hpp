#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hlc/scenario.hpp"
#include "hlc/table.hpp"

namespace hlc {

struct Verdict {
  std::string rule;
  bool passed = false;
  /// Primary measured number and the threshold it was compared with.
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

nlohmann::json to_json(const Verdict& v);

/// Everything a verdict depends on: the recorded tables plus numbers derived
/// before the run (k_I, cone speeds), as stored in the manifest.
struct RunTables {
  std::map<std::string, Table> tables;
  nlohmann::json derived;
};

/// Fit results keyed by series name; pure function of the tables.
nlohmann::json compute_fits(const Scenario& s, const RunTables& run);
std::vector<Verdict> evaluate_verdicts(const Scenario& s, const RunTables& run, const nlohmann::json& fits);

struct RunRecord {
  Scenario scenario;
  std::string config_hash;
  nlohmann::json manifest;
  nlohmann::json fits;
  std::vector<Verdict> verdicts;
  /// Set when a module error aborted the run.
  std::string error;

  bool passed() const;
  /// 0 all verdicts pass, 1 some verdict fails, 2 execution error.
  int exit_code() const;
};

/// Runs one experiment and writes manifest.json, series.csv, fits.json,
/// verdicts.json, snapshots and kind-specific tables into `out_dir`. Module
/// errors are caught and recorded as an error manifest.
RunRecord run_scenario(const Scenario& s, const std::filesystem::path& out_dir);

struct SweepCell {
  double value = 0.0;
  std::filesystem::path dir;
  RunRecord record;
};

/// Independent runs of `base` with `axis` set to each value, `threads` at a
/// time. Writes summary.csv into `out_dir`.
std::vector<SweepCell> sweep(const Scenario& base, const std::string& axis, const std::vector<double>& values,
                             const std::filesystem::path& out_dir, int threads);

/// One line per problem found; empty when the run directory is consistent.
struct ValidationReport {
  std::vector<std::string> problems;
  std::vector<std::string> checked;
  bool ok() const { return problems.empty(); }
};

/// Re-derives the config hash, checks it in every artifact, re-reads the
/// snapshots and recomputes fits and verdicts from the CSV files.
ValidationReport validate_run(const std::filesystem::path& run_dir, const Scenario* expected = nullptr);

/// Emits cone_heatmap.csv, fits.csv and contraction.csv for plotting.
std::vector<std::filesystem::path> write_report(const std::filesystem::path& run_dir);

/// Build identification recorded in manifests and snapshot sidecars.
std::string build_version();

}  // namespace hlc
