// Command-line front end: one subcommand per experiment family plus sweep,
// validate and report. Exit codes: 0 pass, 1 verdict failure, 2 error.

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "hlc/errors.hpp"
#include "hlc/harness.hpp"

namespace fs = std::filesystem;
using namespace hlc;

namespace {

struct Globals {
  std::string config;
  std::string out = "run";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

Scenario load(const Globals& g) {
  if (g.config.empty()) throw InvalidParameter("--config is required");
  Scenario s = load_scenario(g.config);
  if (g.seed) s.seed = *g.seed;
  return s;
}

void print_record(const RunRecord& r, const fs::path& dir) {
  std::printf("run %s  kind=%s  hash=%s\n", dir.string().c_str(), to_string(r.scenario.kind).c_str(),
              r.config_hash.c_str());
  if (!r.error.empty()) {
    std::printf("ERROR %s\n", r.error.c_str());
    return;
  }
  for (const auto& v : r.verdicts)
    std::printf("%s  %-32s value=%-14.6g threshold=%-10.4g %s\n", v.passed ? "PASS" : "FAIL", v.rule.c_str(),
                v.value, v.threshold, v.detail.c_str());
}

int run_kind(const Globals& g, std::optional<ExperimentKind> kind) {
  Scenario s = load(g);
  if (kind) s.kind = *kind;
  const RunRecord r = run_scenario(s, g.out);
  print_record(r, g.out);
  return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hartree light-cone simulator and verification harness"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Scenario TOML file");
  app.add_option("--out", g.out, "Output directory (run directory for validate/report)");
  app.add_option("--seed", g.seed, "Seed for randomized estimators, overrides the config");
  app.add_option("--threads", g.threads, "Parallel runs in sweeps")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Run the experiment kind named in the config");
  auto* kbound = app.add_subcommand("kbound", "Speed bound k_I over the configured shoulder widths");
  auto* prepare = app.add_subcommand("prepare-data", "Construct the initial datum by fixed-point iteration");
  auto* lightcone = app.add_subcommand("lightcone", "Cone tail-mass run (linear, Hartree, NLS or sharpness)");
  auto* decay = app.add_subcommand("decay", "L^p and W decay-rate fits");

  auto* sweep_cmd = app.add_subcommand("sweep", "Independent runs over one config axis");
  std::string axis;
  std::vector<double> values;
  bool values_given = false;
  sweep_cmd->add_option("--axis", axis, "Dotted config path, e.g. data.epsilon");
  sweep_cmd->add_option("--values", values, "Comma-separated values")->delimiter(',')->each([&](const std::string&) {
    values_given = true;
  });

  auto* validate_cmd = app.add_subcommand("validate", "Check hashes and recompute verdicts of a run directory");
  auto* report = app.add_subcommand("report", "Emit plotting CSVs for a run directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_kind(g, std::nullopt);
    if (kbound->parsed()) return run_kind(g, ExperimentKind::kbound_validation);
    if (prepare->parsed()) return run_kind(g, ExperimentKind::datagen_probe);
    if (decay->parsed()) return run_kind(g, ExperimentKind::decay_rates);
    if (lightcone->parsed()) {
      Scenario s = load(g);
      const bool cone = s.kind == ExperimentKind::linear_cone || s.kind == ExperimentKind::hartree_cone ||
                        s.kind == ExperimentKind::nls_cone || s.kind == ExperimentKind::sharpness;
      if (!cone)
        s.kind = s.pair.family == PairFamily::zero || s.pair.amplitude == 0.0 ? ExperimentKind::linear_cone
                                                                              : ExperimentKind::hartree_cone;
      const RunRecord r = run_scenario(s, g.out);
      print_record(r, g.out);
      return r.exit_code();
    }
    if (sweep_cmd->parsed()) {
      const Scenario base = load(g);
      if (axis.empty()) axis = base.sweep_axis;
      if (!values_given) values = base.sweep_values;
      if (axis.empty() && !values.empty()) throw InvalidParameter("sweep needs --axis or sweep.axis in the config");
      const auto cells = sweep(base, axis, values, g.out, g.threads);
      int worst = 0;
      for (const auto& c : cells) {
        std::printf("%s = %g\n", axis.c_str(), c.value);
        print_record(c.record, c.dir);
        worst = std::max(worst, c.record.exit_code());
      }
      std::printf("summary: %s\n", (fs::path(g.out) / "summary.csv").string().c_str());
      return worst;
    }
    if (validate_cmd->parsed()) {
      std::optional<Scenario> expected;
      if (!g.config.empty()) expected = load(g);
      const ValidationReport rep = validate_run(g.out, expected ? &*expected : nullptr);
      for (const auto& c : rep.checked) std::printf("ok       %s\n", c.c_str());
      for (const auto& p : rep.problems) std::printf("PROBLEM  %s\n", p.c_str());
      return rep.ok() ? 0 : 1;
    }
    if (report->parsed()) {
      const auto files = write_report(g.out);
      if (files.empty()) std::printf("nothing to report\n");
      for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
      const fs::path heat = fs::path(g.out) / "cone_heatmap.csv";
      if (!fs::exists(heat)) std::printf("no 1D snapshot series; heatmap skipped\n");
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
