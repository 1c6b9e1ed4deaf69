#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hlc/errors.hpp"
#include "hlc/harness.hpp"
#include "hlc/snapshot.hpp"
#include "hlc/table.hpp"

using namespace hlc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hlc_test_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Small free-dispersion run: a few seconds.
Scenario quick_decay() {
  return parse_scenario(R"(
kind = "decay_rates"
[grid]
n = 256
L = 128.0
[data]
mode = "seed"
seed_width = 1.0
seed_momentum = 0.0
[evolution]
T = 10.0
dt = 0.01
record_stride = 10
[observables]
fit_t_lo = 2.0
[output]
snapshots = 3
)");
}

}  // namespace

TEST_CASE("table round trip is exact") {
  Table t;
  t.add("t", {0.0, 0.1, 1.0 / 3});
  t.add("value", {1e-300, -INFINITY, 6.02214076e23});
  std::stringstream s;
  write_table(s, t, "feedfacecafebeef");
  const TableFile back = read_table(s);
  CHECK(back.config_hash == "feedfacecafebeef");
  CHECK(back.table.columns == t.columns);
  CHECK(back.table.data == t.data);
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK_THROWS_WITH_AS(t.column("missing"), doctest::Contains("available"), InvalidParameter);
}

TEST_CASE("malformed tables are rejected") {
  std::istringstream ragged("# config_hash: 0\na,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_table(ragged), FormatError);
  std::istringstream word("# config_hash: 0\na\nabc\n");
  CHECK_THROWS_AS(read_table(word), FormatError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_table(empty), FormatError);
}

TEST_CASE("snapshot round trip and validation") {
  const Grid g(2, 8, 3.5);
  WaveFunction psi(g);
  for (std::size_t i = 0; i < g.size(); ++i) psi[i] = {std::sin(0.1 * i), 1.0 / (1 + i)};
  std::stringstream s;
  write_snapshot(s, psi);
  const std::string bytes = s.str();
  CHECK(bytes.size() == kSnapshotHeaderBytes + 16 * g.size());
  CHECK(bytes.compare(0, 6, "PSIWF1") == 0);

  std::istringstream in(bytes);
  const WaveFunction back = read_snapshot(in);
  CHECK(back.grid() == g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(back[i] == psi[i]);

  std::istringstream truncated(bytes.substr(0, bytes.size() - 5));
  const std::string expected = "size mismatch: expected " + std::to_string(bytes.size()) + " bytes, got " +
                               std::to_string(bytes.size() - 5);
  CHECK_THROWS_WITH_AS(read_snapshot(truncated), doctest::Contains(expected.c_str()), FormatError);
  std::istringstream header(bytes.substr(0, 10));
  CHECK_THROWS_WITH_AS(read_snapshot(header), doctest::Contains("truncated header"), FormatError);
  std::string bad = bytes;
  bad[0] = 'X';
  std::istringstream magic(bad);
  CHECK_THROWS_WITH_AS(read_snapshot(magic), doctest::Contains("bad magic"), FormatError);

  const fs::path dir = scratch("snap");
  write_snapshot(dir / "a.psiwf", psi);
  write_sidecar(dir / "a.psiwf", {{"config_hash", "x"}, {"t", 1.5}});
  CHECK(sidecar_path(dir / "a.psiwf").filename() == "a.psiwf.json");
  CHECK(read_sidecar(dir / "a.psiwf")["t"] == 1.5);
}

TEST_CASE("scenario parsing is strict") {
  CHECK_THROWS_WITH_AS(parse_scenario("[grid]\nnn = 3\n"), doctest::Contains("nn"), InvalidParameter);
  CHECK_THROWS_AS(parse_scenario("[grid]\nn = \"big\"\n"), InvalidParameter);
  CHECK_THROWS_AS(parse_scenario("kind = \"warp_drive\"\n"), InvalidParameter);
  CHECK_THROWS_AS(parse_scenario("schema = \"hlc-scenario/2\"\n"), InvalidParameter);
  CHECK_THROWS_WITH_AS(parse_scenario("[grid\nn = 3\n"), doctest::Contains("1:"), InvalidParameter);
  // Every violated constraint is listed.
  CHECK_THROWS_WITH_AS(parse_scenario("[evolution]\ndt = -1.0\n[window]\nshoulder = -0.1\n"),
                       doctest::Contains("shoulder"), InvalidParameter);

  const Scenario s = parse_scenario("[observables]\np = [2.0, inf]\n[[cones]]\nc_multiplier = 0.8\nexpect = \"escape\"\n");
  REQUIRE(s.p_list.size() == 2);
  CHECK(std::isinf(s.p_list[1]));
  REQUIRE(s.cones.size() == 1);
  CHECK(s.cones[0].expect == "escape");
  CHECK(scenario_from_json(to_json(s)).p_list == s.p_list);
}

TEST_CASE("config hash is canonical") {
  const std::string h0 = config_hash(Scenario{});
  CHECK(h0.size() == 16);
  CHECK(config_hash(parse_scenario("")) == h0);
  CHECK(config_hash(parse_scenario("seed = 12648430\n[grid]\nn = 1024\n")) == h0);
  CHECK(config_hash(parse_scenario("[data]\nepsilon = 0.025\n")) != h0);
  CHECK(config_hash(scenario_from_json(to_json(quick_decay()))) == config_hash(quick_decay()));
}

TEST_CASE("dotted overrides") {
  const Scenario base;
  CHECK(with_override(base, "data.epsilon", 0.1).epsilon == 0.1);
  CHECK(with_override(base, "grid.n", 256).n == 256);
  CHECK(with_override(base, "propagation.enabled", 1).propagation);
  CHECK_THROWS_AS(with_override(base, "data.nope", 1.0), InvalidParameter);
  CHECK_THROWS_AS(with_override(base, "grid.n", 100.5), InvalidParameter);
}

TEST_CASE("runs are deterministic and self-validating") {
  const fs::path a = scratch("run_a");
  const fs::path b = scratch("run_b");
  const RunRecord ra = run_scenario(quick_decay(), a);
  const RunRecord rb = run_scenario(quick_decay(), b);
  REQUIRE(ra.error.empty());
  CHECK(ra.config_hash == rb.config_hash);
  for (const char* f : {"series.csv", "fits.json", "verdicts.json"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(fs::exists(a / "manifest.json"));
  CHECK(fs::exists(a / "snapshots"));

  const ValidationReport ok = validate_run(a);
  CHECK(ok.ok());
  CHECK_FALSE(ok.checked.empty());
  const Scenario expected = quick_decay();
  CHECK(validate_run(a, &expected).ok());
  const Scenario other = with_override(expected, "data.epsilon", 0.01);
  CHECK_FALSE(validate_run(a, &other).ok());

  // Change one recorded number inside the fit window: the recomputed fits no longer match.
  TableFile series = read_table(a / "series.csv");
  const auto& names = series.table.columns;
  const auto j = static_cast<std::size_t>(std::find(names.begin(), names.end(), "lp_inf") - names.begin());
  REQUIRE(j < names.size());
  series.table.data[j][series.table.rows() - 2] *= 2.0;
  write_table(a / "series.csv", series.table, series.config_hash);
  CHECK_FALSE(validate_run(a).ok());

  // A foreign config hash in one artifact is detected.
  std::string fits = slurp(b / "verdicts.json");
  fits.replace(fits.find(rb.config_hash), 16, "0000000000000000");
  std::ofstream(b / "verdicts.json", std::ios::binary) << fits;
  const ValidationReport bad = validate_run(b);
  CHECK_FALSE(bad.ok());

  CHECK_THROWS(write_report(a / ".."));
}

TEST_CASE("report files for a 1D run") {
  const fs::path a = scratch("report");
  REQUIRE(run_scenario(quick_decay(), a).error.empty());
  const auto files = write_report(a);
  CHECK(fs::exists(a / "fits.csv"));
  CHECK(fs::exists(a / "cone_heatmap.csv"));
  const TableFile heat = read_table(a / "cone_heatmap.csv");
  CHECK(heat.table.columns == std::vector<std::string>{"t", "x", "abs_psi"});
  CHECK(heat.table.rows() == 3 * 256);
}

TEST_CASE("module errors become exit code 2 with an error manifest") {
  Scenario s = parse_scenario(R"(
kind = "datagen_probe"
[grid]
n = 256
L = 64.0
[pair]
family = "gaussian"
amplitude = 0.5
[data]
tau_max = 4.0
tol_tail = 1e-30
)");
  const fs::path dir = scratch("error");
  const RunRecord r = run_scenario(s, dir);
  CHECK(r.exit_code() == 2);
  CHECK_FALSE(r.error.empty());
  std::ifstream in(dir / "manifest.json");
  const auto m = nlohmann::json::parse(in);
  CHECK(m["status"] == "error");
  CHECK(m["error"]["type"] == "ToleranceNotMet");
}

TEST_CASE("empty sweep writes an empty summary") {
  const fs::path dir = scratch("sweep_empty");
  const auto cells = sweep(quick_decay(), "data.epsilon", {}, dir, 2);
  CHECK(cells.empty());
  const TableFile t = read_table(dir / "summary.csv");
  CHECK(t.table.rows() == 0);
}

TEST_CASE("two-cell sweep in parallel") {
  const fs::path dir = scratch("sweep");
  const auto cells = sweep(quick_decay(), "data.epsilon", {0.05, 0.1}, dir, 2);
  REQUIRE(cells.size() == 2);
  CHECK(cells[1].record.scenario.epsilon == 0.1);
  const TableFile t = read_table(dir / "summary.csv");
  CHECK(t.table.rows() == 2);
  CHECK(t.table.column("value") == std::vector<double>{0.05, 0.1});
  CHECK(validate_run(cells[0].dir).ok());
}
