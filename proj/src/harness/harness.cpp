#include "hlc/harness.hpp"

#include <fftw3.h>
#include <toml.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <thread>

#include "hlc/datagen.hpp"
#include "hlc/errors.hpp"
#include "hlc/funcalc.hpp"
#include "hlc/observables.hpp"
#include "hlc/operators.hpp"
#include "hlc/propagators.hpp"
#include "hlc/snapshot.hpp"

#ifndef HLC_GIT_DESCRIBE
#define HLC_GIT_DESCRIBE "unknown"
#endif

namespace hlc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json num(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double num_of(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j == "inf") return std::numeric_limits<double>::infinity();
  if (j == "-inf") return -std::numeric_limits<double>::infinity();
  return kNaN;
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return json::parse(in);
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
  if (dynamic_cast<const ToleranceNotMet*>(&e)) return "ToleranceNotMet";
  if (dynamic_cast<const ConvergenceFailure*>(&e)) return "ConvergenceFailure";
  if (dynamic_cast<const BlowUp*>(&e)) return "BlowUp";
  if (dynamic_cast<const CoverageError*>(&e)) return "CoverageError";
  if (dynamic_cast<const FormatError*>(&e)) return "FormatError";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
  if (dynamic_cast<const InvalidParameter*>(&e)) return "InvalidParameter";
  return "Error";
}

// sqrt(<|x|^2> - |<x>|^2) under the density |psi|^2.
double position_spread(const WaveFunction& psi) {
  const Grid& g = psi.grid();
  double mass = 0.0, r2 = 0.0;
  std::vector<double> mean(static_cast<std::size_t>(g.dim()), 0.0);
  const auto rr = g.radius_squared();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = std::norm(psi[i]);
    mass += w;
    r2 += w * rr[i];
    for (int a = 0; a < g.dim(); ++a) mean[a] += w * g.coordinate(g.axis_index(i, a));
  }
  if (!(mass > 0.0)) return 0.0;
  double m2 = 0.0;
  for (double x : mean) m2 += (x / mass) * (x / mass);
  return std::sqrt(std::max(r2 / mass - m2, 0.0));
}

bool is_cone_kind(ExperimentKind k) {
  return k == ExperimentKind::linear_cone || k == ExperimentKind::hartree_cone || k == ExperimentKind::nls_cone ||
         k == ExperimentKind::sharpness;
}

SpectralWindow scenario_window(const Scenario& s) {
  return SpectralWindow::from_plateau(s.plateau_lo, s.plateau_hi, s.shoulder);
}

WaveFunction seed_profile(const Scenario& s, const Grid& grid) {
  WaveFunction phi(grid);
  const auto x0 = grid.axis_coordinates(0);
  const auto rr = grid.radius_squared();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = x0[grid.axis_index(i, 0)];
    // Shift the centre along the first axis only.
    const double r2 = rr[i] - x * x + (x - s.seed_center) * (x - s.seed_center);
    phi[i] = std::exp(-r2 / (2.0 * s.seed_width * s.seed_width)) * std::polar(1.0, s.seed_momentum * x);
  }
  return phi;
}

json fit_json(const PowerLawFit& f) {
  return {{"exponent", num(f.exponent)},
          {"amplitude", num(f.amplitude)},
          {"r2", num(f.r2)},
          {"window", {num(f.t_lo), num(f.t_hi)}},
          {"samples", f.samples},
          {"flags", f.flags}};
}

json failed_fit(double lo, double hi, const std::string& why) {
  return {{"exponent", nullptr},
          {"amplitude", nullptr},
          {"r2", nullptr},
          {"window", {num(lo), num(hi)}},
          {"samples", 0},
          {"flags", {"fit_failed: " + why}}};
}

json safe_fit(const std::vector<double>& t, const std::vector<double>& v, double lo, double hi) {
  try {
    return fit_json(decay_fit(t, v, lo, hi));
  } catch (const Error& e) {
    return failed_fit(lo, hi, e.what());
  }
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

json certificate_json(const TailCertificate& c) {
  return {{"bound", num(c.bound)},
          {"route", c.route},
          {"sup_exponent", num(c.sup_fit.exponent)},
          {"derivative_exponent", num(c.derivative_fit.exponent)},
          {"commutator_constant", num(c.commutator_constant)},
          {"converged", c.converged}};
}

double route_code(const std::string& r) {
  if (r == "zero") return 0;
  if (r == "sup") return 1;
  if (r == "derivative") return 2;
  return 3;
}

Table contraction_table(const DatumResult& d) {
  Table t;
  std::vector<double> it, inc, ratio, cert, route;
  for (std::size_t i = 0; i < d.increments.size(); ++i) {
    it.push_back(static_cast<double>(i + 1));
    inc.push_back(d.increments[i]);
    ratio.push_back(i == 0 || d.increments[i - 1] == 0.0 ? kNaN : d.increments[i] / d.increments[i - 1]);
    cert.push_back(d.certificates[i].bound);
    route.push_back(route_code(d.certificates[i].route));
  }
  t.add("iteration", it);
  t.add("increment", inc);
  t.add("ratio", ratio);
  t.add("certificate", cert);
  t.add("route", route);
  return t;
}

struct Prepared {
  WaveFunction psi0;
  std::optional<DatumResult> datum;
};

Prepared prepare_initial(const Scenario& s, const HamiltonianOp& h, json& manifest) {
  const Grid& grid = h.grid();
  WaveFunction seed = seed_profile(s, grid);
  if (s.data_mode == "seed") {
    const double norm = sobolev_norm(seed, s.s);
    seed *= s.epsilon / norm;
    return {seed, std::nullopt};
  }
  DataGenSpec spec(seed);
  spec.job.window = scenario_window(s);
  spec.job.pair = s.pair;
  spec.job.tau_max = s.tau_max;
  spec.job.tol_tail = s.tol_tail;
  spec.job.stepper.dt = s.data_dt;
  spec.job.stepper.drift_tolerance = s.drift_tolerance;
  spec.job.cheb_tol = s.cheb_tol;
  spec.job.commutator.seed = s.seed;
  spec.b = s.b;
  spec.epsilon = s.epsilon;
  spec.s = s.s;
  spec.gamma = s.gamma;
  spec.fp_tol = s.fp_tol;
  spec.max_iters = s.max_iters;
  DatumResult d = construct_datum(h, spec);

  json certs = json::array();
  for (const auto& c : d.certificates) certs.push_back(certificate_json(c));
  json ratios = json::array();
  for (double r : d.ratios) ratios.push_back(num(r));
  manifest["derived"]["datum"] = {
      {"iterations", d.iterations},
      {"residual", num(d.residual)},
      {"increments", d.increments},
      {"ratios", ratios},
      {"certificates", certs},
      {"gamma_check", {{"lower", d.gamma_check.lower}, {"upper", d.gamma_check.upper},
                       {"admissible", d.gamma_check.admissible}}},
      {"norm_hs", sobolev_norm(d.psi0, s.s)},
      {"norm_l2g", weighted_norm(d.psi0, s.gamma)},
  };
  if (!d.gamma_check.admissible)
    manifest["warnings"].push_back("gamma outside (d/(2q), d/q - 1); construction run anyway");
  WaveFunction psi0 = d.psi0;
  return {std::move(psi0), std::move(d)};
}

void save_snapshot(const fs::path& path, const WaveFunction& psi, const json& extra, const std::string& hash,
                   json& manifest) {
  write_snapshot(path, psi);
  json side = extra;
  side["config_hash"] = hash;
  side["build"] = build_version();
  side["grid"] = {{"dim", psi.grid().dim()}, {"n", psi.grid().n()}, {"L", psi.grid().box_length()}};
  write_sidecar(path, side);
  manifest["files"].push_back(fs::relative(path, manifest["_dir"].get<std::string>()).string());
}

void write_trajectory_snapshots(const Scenario& s, const Trajectory& traj, const fs::path& dir,
                                const std::string& hash, json& manifest) {
  if (s.snapshots == 0 || traj.snapshots.empty()) return;
  fs::create_directories(dir / "snapshots");
  const std::size_t count = std::min<std::size_t>(s.snapshots, traj.snapshots.size());
  std::size_t last = static_cast<std::size_t>(-1);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i =
        count == 1 ? 0 : static_cast<std::size_t>(std::llround(k * (traj.snapshots.size() - 1.0) / (count - 1.0)));
    if (i == last) continue;
    last = i;
    char name[32];
    std::snprintf(name, sizeof name, "snap_%04zu.psiwf", i);
    save_snapshot(dir / "snapshots" / name, traj.snapshots[i], {{"time", traj.times[i]}, {"index", i}}, hash,
                  manifest);
  }
}

RunTables load_tables(const fs::path& dir, const std::string& hash, const json& derived) {
  RunTables run;
  run.derived = derived;
  for (const char* name : {"series", "propagation"}) {
    const fs::path p = dir / (std::string(name) + ".csv");
    if (!fs::exists(p)) continue;
    TableFile f = read_table(p);
    if (f.config_hash != hash) throw FormatError(p.string() + ": config hash " + f.config_hash + " != " + hash, 0);
    run.tables[name] = std::move(f.table);
  }
  return run;
}

const Table& table(const RunTables& run, const std::string& name) {
  const auto it = run.tables.find(name);
  if (it == run.tables.end()) throw InvalidParameter("run has no " + name + " table");
  return it->second;
}

Verdict conservation_verdict(const Scenario& s, const Table& series) {
  const auto& l2 = series.column("l2");
  double drift = 0.0;
  for (double v : l2) drift = std::max(drift, std::abs(v - l2.front()) / l2.front());
  return {"l2_conservation", drift <= s.drift_tolerance, drift, s.drift_tolerance,
          "max relative l2 drift over the run"};
}

}  // namespace

std::string build_version() { return HLC_GIT_DESCRIBE; }

json to_json(const Verdict& v) {
  return {{"rule", v.rule},
          {"passed", v.passed},
          {"value", num(v.value)},
          {"threshold", num(v.threshold)},
          {"detail", v.detail}};
}

bool RunRecord::passed() const {
  return error.empty() && std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

int RunRecord::exit_code() const {
  if (!error.empty()) return 2;
  return passed() ? 0 : 1;
}

json compute_fits(const Scenario& s, const RunTables& run) {
  json fits = json::object();
  if (s.kind == ExperimentKind::datagen_probe || s.kind == ExperimentKind::kbound_validation) return fits;
  const Table& series = table(run, "series");
  const auto& t = series.column("t");
  for (double p : s.p_list) fits[lp_column(p)] = safe_fit(t, series.column(lp_column(p)), s.fit_t_lo, s.T);
  if (!all_zero(series.column("W_linf"))) fits["W_linf"] = safe_fit(t, series.column("W_linf"), s.fit_t_lo, s.T);
  if (run.derived.contains("cones")) {
    const double half = 0.5 * s.L;
    for (const auto& cone : run.derived["cones"]) {
      const double c = cone["c"], a = cone["a"];
      // Times with c t + a >= L/2 are box-limited and left out.
      const double t_hi = std::min(s.T, (half - a) / c * (1.0 - 1e-12));
      const std::string col = cone["column"];
      fits[col] = t_hi > s.fit_t_lo ? safe_fit(t, series.column(col), s.fit_t_lo, t_hi)
                                    : failed_fit(s.fit_t_lo, t_hi, "cone reaches the box edge before fit_t_lo");
    }
  }
  return fits;
}

std::vector<Verdict> evaluate_verdicts(const Scenario& s, const RunTables& run, const json& fits) {
  std::vector<Verdict> out;
  const json& derived = run.derived;
  switch (s.kind) {
    case ExperimentKind::linear_cone:
    case ExperimentKind::hartree_cone:
    case ExperimentKind::nls_cone:
    case ExperimentKind::sharpness: {
      out.push_back(conservation_verdict(s, table(run, "series")));
      for (const auto& cone : derived["cones"]) {
        const std::string col = cone["column"];
        const double e = num_of(fits[col]["exponent"]);
        const bool escape = cone["expect"] == "escape";
        Verdict v{"cone:" + col, false, e, escape ? s.escape_exponent_min : s.tail_exponent_max, ""};
        v.passed = !std::isnan(e) && (escape ? e > v.threshold : e <= v.threshold);
        v.detail = escape ? "tail exponent must exceed threshold (mass escapes)" : "tail exponent <= threshold";
        out.push_back(v);
      }
      if (run.tables.count("propagation")) {
        const Table& p = table(run, "propagation");
        const double sc = derived["propagation"]["s"];
        const EnvelopeFit env = fit_envelope(p.column("dphi"), p.column("w_t"), sc);
        double scale = 1.0;
        for (double d : p.column("dphi")) scale = std::max(scale, std::abs(d));
        Verdict v{"propagation_envelope", false, env.max_excess, 1e-12 * scale, ""};
        v.passed = env.C >= 0.0 && env.C_prime >= 0.0 && env.max_excess <= v.threshold;
        char buf[160];
        std::snprintf(buf, sizeof buf, "dphi <= C/s + C' w_t with C = %.6g, C' = %.6g", env.C, env.C_prime);
        v.detail = buf;
        out.push_back(v);
        double worst = 0.0;
        const auto& phi = p.column("phi");
        const auto& n2 = p.column("norm_squared");
        for (std::size_t i = 0; i < phi.size(); ++i)
          worst = std::max({worst, -phi[i], phi[i] - n2[i]});
        out.push_back({"propagation_range", worst <= 1e-12, worst, 1e-12, "<Phi> within [0, |psi|^2]"});
      }
      break;
    }
    case ExperimentKind::decay_rates: {
      const Table& series = table(run, "series");
      out.push_back(conservation_verdict(s, series));
      const double expected = std::isnan(s.linf_exponent) ? -0.5 * s.dim : s.linf_exponent;
      const double e = num_of(fits["lp_inf"]["exponent"]);
      Verdict v{"linf_exponent", false, e, s.linf_tol, ""};
      v.passed = std::abs(e - expected) <= s.linf_tol;
      v.detail = "|exponent - (" + format_double(expected) + ")| <= tolerance";
      out.push_back(v);
      if (fits.contains("W_linf")) {
        const double ew = num_of(fits["W_linf"]["exponent"]);
        const double ratio = ew / (2.0 * e);
        Verdict w{"w_decay_vs_lp", std::abs(ratio - 1.0) <= s.w_ratio_tol, ratio, s.w_ratio_tol,
                  "W_linf exponent / (2 * lp_inf exponent) within 1 +- tolerance"};
        if (std::isnan(ratio)) w.passed = false;
        out.push_back(w);
      }
      break;
    }
    case ExperimentKind::datagen_probe: {
      const Table& c = table(run, "series");
      const auto& inc = c.column("increment");
      const double residual = inc.empty() ? kNaN : inc.back();
      out.push_back({"fixed_point_converged",
                     residual < s.fp_tol && static_cast<int>(inc.size()) <= s.max_iters, residual, s.fp_tol,
                     std::to_string(inc.size()) + " iterations"});
      double worst = 0.0;
      for (double r : c.column("ratio"))
        if (!std::isnan(r)) worst = std::max(worst, r);
      out.push_back({"contraction_ratios", worst < 1.0, worst, 1.0, "max measured contraction ratio < 1"});
      double cert = 0.0;
      for (double b : c.column("certificate")) cert = std::max(cert, b);
      out.push_back({"tail_certificates", cert <= s.tol_tail, cert, s.tol_tail, "max tail certificate"});
      break;
    }
    case ExperimentKind::kbound_validation: {
      const Table& k = table(run, "series");
      const auto& shoulders = k.column("shoulder");
      const auto& values = k.column("k_I");
      std::vector<std::size_t> order(shoulders.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return shoulders[a] > shoulders[b]; });
      // Windows with narrower shoulders are pointwise smaller, so k_I cannot grow.
      double rise = 0.0;
      for (std::size_t i = 1; i < order.size(); ++i)
        rise = std::max(rise, values[order[i]] - values[order[i - 1]]);
      out.push_back({"kbound_monotone", rise <= s.kbound_tol, rise, s.kbound_tol,
                     "k_I nonincreasing as the shoulder shrinks"});
      if (s.potential.family == ExternalFamily::zero || s.potential.amplitude == 0.0) {
        const double sharp = std::sqrt(2.0 * s.plateau_hi);
        const auto& bound = k.column("bound");
        double excess = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < values.size(); ++i)
          excess = std::max(excess, std::abs(values[i] - sharp) - bound[i]);
        out.push_back({"kbound_bound", excess <= s.kbound_tol, excess, s.kbound_tol,
                       "|k_I - sqrt(2 E2)| - (sqrt(2 (E2 + shoulder)) - sqrt(2 E2)) <= tol"});
      }
      break;
    }
  }
  return out;
}

RunRecord run_scenario(const Scenario& s, const fs::path& out_dir) {
  RunRecord rec;
  rec.scenario = s;
  rec.config_hash = config_hash(s);
  fs::create_directories(out_dir);
  Stopwatch clock;
  const auto t_start = std::chrono::steady_clock::now();

  json m;
  m["schema"] = "hlc-manifest/1";
  m["config_hash"] = rec.config_hash;
  m["kind"] = to_string(s.kind);
  m["scenario"] = to_json(s);
  m["versions"] = {{"hlc", build_version()},
                   {"fftw", std::string(fftw_version)},
                   {"compiler", __VERSION__},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"tomlplusplus", std::to_string(TOML_LIB_MAJOR) + "." + std::to_string(TOML_LIB_MINOR) + "." +
                                        std::to_string(TOML_LIB_PATCH)}};
  m["seeds"] = {{"scenario", s.seed}, {"lanczos", s.seed}, {"commutator", s.seed}};
  m["timings"] = json::object();
  m["warnings"] = json::array();
  m["files"] = json::array();
  m["derived"] = json::object();
  m["_dir"] = out_dir.string();

  try {
    validate(s);
    const Grid grid(s.dim, s.n, s.L);
    const HamiltonianOp h(grid, s.potential);
    const ConditionReport cond = check_conditions(s.potential, s.pair, s.dim);
    m["conditions"] = {{"v_integrability", to_string(cond.v_integrability)},
                       {"v_smoothness", to_string(cond.v_smoothness)},
                       {"q_range", to_string(cond.q_range)},
                       {"V_decay", to_string(cond.V_decay)},
                       {"V_negative_part_small", to_string(cond.V_negative_part_small)},
                       {"V_positive_part_decay", to_string(cond.V_positive_part_decay)},
                       {"notes", cond.notes}};
    if (!cond.all_pass()) m["warnings"].push_back("check_conditions reports failed or unchecked conditions");
    m["timings"]["setup"] = clock.lap();

    const SpectralWindow window = scenario_window(s);
    SpeedBoundOptions sb_opts;
    sb_opts.lanczos.seed = s.seed;

    if (s.kind == ExperimentKind::kbound_validation) {
      Table t;
      std::vector<double> sh, k, res, its, bound;
      for (double d : s.kbound_shoulders) {
        const SpeedBoundResult r =
            speed_bound(h, SpectralWindow::from_plateau(s.plateau_lo, s.plateau_hi, d), 1e-10, sb_opts);
        sh.push_back(d);
        k.push_back(r.k_I);
        res.push_back(r.residual);
        its.push_back(r.iterations);
        bound.push_back(std::sqrt(2.0 * (s.plateau_hi + d)) - std::sqrt(2.0 * s.plateau_hi));
      }
      t.add("shoulder", sh);
      t.add("k_I", k);
      t.add("residual", res);
      t.add("iterations", its);
      t.add("bound", bound);
      write_table(out_dir / "series.csv", t, rec.config_hash);
      m["timings"]["kbound"] = clock.lap();
    } else if (s.kind == ExperimentKind::datagen_probe) {
      Prepared init = prepare_initial(s, h, m);
      m["timings"]["datagen"] = clock.lap();
      write_table(out_dir / "series.csv", contraction_table(*init.datum), rec.config_hash);
      save_snapshot(out_dir / "psi0.psiwf", init.psi0, {{"time", 0.0}, {"role", "psi0"}}, rec.config_hash, m);
      save_snapshot(out_dir / "phi_input.psiwf", init.datum->phi_input, {{"time", 0.0}, {"role", "phi_input"}},
                    rec.config_hash, m);
    } else {
      double k_I = kNaN;
      const bool need_kI = (is_cone_kind(s.kind) && s.kind != ExperimentKind::sharpness) || s.propagation;
      if (need_kI) {
        const SpeedBoundResult r = speed_bound(h, window, 1e-8, sb_opts);
        k_I = r.k_I;
        m["derived"]["k_I"] = k_I;
        m["derived"]["k_I_residual"] = r.residual;
        m["timings"]["speed_bound"] = clock.lap();
      }
      Prepared init = prepare_initial(s, h, m);
      m["timings"]["initial_data"] = clock.lap();
      if (init.datum)
        save_snapshot(out_dir / "psi0.psiwf", init.psi0, {{"time", 0.0}, {"role", "psi0"}}, rec.config_hash, m);

      StepperConfig cfg;
      cfg.dt = s.dt;
      cfg.record_stride = s.record_stride;
      cfg.drift_tolerance = s.drift_tolerance;
      const bool interacting = s.pair.family != PairFamily::zero && s.pair.amplitude != 0.0;
      if (interacting && PairInteraction(s.pair, h.grid()).wraps())
        m["warnings"].push_back("pair potential wraps: v(L/2) / v(0) > 1e-10");
      Trajectory traj = [&] {
        switch (s.kind) {
          case ExperimentKind::hartree_cone:
            return evolve_hartree(h, s.pair, init.psi0, s.T, cfg);
          case ExperimentKind::nls_cone:
            return evolve_nls(h, s.nls_sigma, init.psi0, s.T, cfg, s.nls_coupling);
          case ExperimentKind::decay_rates:
            return interacting ? evolve_hartree(h, s.pair, init.psi0, s.T, cfg)
                               : evolve_linear(h, init.psi0, s.T, cfg);
          default:
            if (interacting) m["warnings"].push_back("pair potential ignored by a linear run");
            return evolve_linear(h, init.psi0, s.T, cfg);
        }
      }();
      m["timings"]["evolve"] = clock.lap();

      ObservableSpec ospec{s.s, s.gamma, s.p_list, {}};
      if (is_cone_kind(s.kind)) {
        const double e2 = s.plateau_hi + s.shoulder;
        const double ref = s.kind == ExperimentKind::sharpness ? std::sqrt(2.0 * e2) : k_I;
        if (s.kind == ExperimentKind::sharpness && s.potential.amplitude != 0.0)
          m["warnings"].push_back("sharpness contrast assumes V = 0");
        m["derived"]["reference_speed"] = ref;
        const double sigma = position_spread(init.psi0);
        m["derived"]["initial_spread"] = sigma;
        m["derived"]["cones"] = json::array();
        for (const auto& c : s.cones) {
          const ConeSpec cone{c.c_multiplier * ref, c.a, s.b};
          ospec.cones.push_back(cone);
          m["derived"]["cones"].push_back(
              {{"column", tail_column(cone)}, {"c", cone.c}, {"a", cone.a}, {"expect", c.expect}});
          if (c.expect == "decay" && s.kind != ExperimentKind::sharpness && !(cone.c > k_I && cone.a > s.b))
            m["warnings"].push_back("cone " + tail_column(cone) + " does not satisfy c > k_I, a > b");
          if (s.L < 2.0 * (cone.a + cone.c * s.T) + 8.0 * sigma)
            m["warnings"].push_back("box shorter than 2 (a + c T) + 8 sigma for cone " + tail_column(cone) +
                                    "; tails may wrap");
        }
      }
      const ObservableSeries series = measure(traj, ospec);
      {
        std::ofstream out(out_dir / "series.csv");
        write_series_csv(out, series, rec.config_hash);
      }
      if (series.wt_truncated) m["warnings"].push_back("w_t tail fit failed; integrals truncated at T");

      if (s.propagation) {
        PropagationObservableSpec pspec;
        pspec.v = s.prop_v_multiplier * k_I;
        pspec.c = s.prop_c_multiplier * k_I;
        pspec.a = s.prop_a;
        pspec.s = s.prop_s > 0.0 ? s.prop_s : s.T;
        const PropagationSeries ps = propagation_observable(traj, pspec);
        m["derived"]["propagation"] = {{"v", pspec.v}, {"c", pspec.c}, {"a", pspec.a}, {"s", pspec.s}};
        Table t;
        t.add("t", ps.times);
        t.add("phi", ps.phi);
        t.add("dphi", ps.dphi);
        t.add("norm_squared", ps.norm_squared);
        t.add("w_t", series.w_t);
        write_table(out_dir / "propagation.csv", t, rec.config_hash);
      }
      write_trajectory_snapshots(s, traj, out_dir, rec.config_hash, m);
      m["timings"]["measure"] = clock.lap();
    }

    const RunTables run = load_tables(out_dir, rec.config_hash, m["derived"]);
    rec.fits = compute_fits(s, run);
    rec.verdicts = evaluate_verdicts(s, run, rec.fits);
    write_json(out_dir / "fits.json", {{"config_hash", rec.config_hash}, {"fits", rec.fits}});
    json vs = json::array();
    for (const auto& v : rec.verdicts) vs.push_back(to_json(v));
    write_json(out_dir / "verdicts.json",
               {{"config_hash", rec.config_hash}, {"passed", rec.passed()}, {"verdicts", vs}});
    m["status"] = "ok";
    m["passed"] = rec.passed();
  } catch (const std::exception& e) {
    rec.error = e.what();
    m["status"] = "error";
    m["error"] = {{"type", error_kind(e)}, {"message", e.what()}};
    if (const auto* nc = dynamic_cast<const NonConvergence*>(&e)) m["error"]["ratios"] = nc->ratios();
    if (const auto* tn = dynamic_cast<const ToleranceNotMet*>(&e)) m["error"]["achieved"] = num(tn->achieved());
  }
  m["timings"]["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  m.erase("_dir");
  for (const char* f : {"series.csv", "propagation.csv", "fits.json", "verdicts.json"})
    if (fs::exists(out_dir / f)) m["files"].push_back(f);
  write_json(out_dir / "manifest.json", m);
  rec.manifest = m;
  return rec;
}

std::vector<SweepCell> sweep(const Scenario& base, const std::string& axis, const std::vector<double>& values,
                             const fs::path& out_dir, int threads) {
  fs::create_directories(out_dir);
  std::vector<SweepCell> cells(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "cell_%03zu", i);
    cells[i].value = values[i];
    cells[i].dir = out_dir / name;
  }
  // Resolve the axis up front so a bad path fails before any run starts.
  Scenario cell_base = base;
  cell_base.sweep_axis.clear();
  cell_base.sweep_values.clear();
  if (!values.empty()) (void)with_override(cell_base, axis, values.front());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        cells[i].record = run_scenario(with_override(cell_base, axis, cells[i].value), cells[i].dir);
      } catch (const std::exception& e) {
        cells[i].record.error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<std::string> rules;
  for (const auto& c : cells)
    for (const auto& v : c.record.verdicts)
      if (std::find(rules.begin(), rules.end(), v.rule) == rules.end()) rules.push_back(v.rule);
  Table summary;
  std::vector<double> value_col, exit_col;
  std::vector<std::vector<double>> metric(rules.size()), pass(rules.size());
  for (const auto& c : cells) {
    value_col.push_back(c.value);
    exit_col.push_back(c.record.exit_code());
    for (std::size_t r = 0; r < rules.size(); ++r) {
      double val = kNaN, ok = kNaN;
      for (const auto& v : c.record.verdicts)
        if (v.rule == rules[r]) {
          val = v.value;
          ok = v.passed ? 1.0 : 0.0;
        }
      metric[r].push_back(val);
      pass[r].push_back(ok);
    }
  }
  summary.add("value", value_col);
  summary.add("exit_code", exit_col);
  for (std::size_t r = 0; r < rules.size(); ++r) {
    summary.add(rules[r] + ".value", metric[r]);
    summary.add(rules[r] + ".pass", pass[r]);
  }
  write_table(out_dir / "summary.csv", summary, config_hash(base));
  return cells;
}

ValidationReport validate_run(const fs::path& dir, const Scenario* expected) {
  ValidationReport rep;
  auto check = [&](bool ok, const std::string& what) {
    (ok ? rep.checked : rep.problems).push_back(what);
  };
  const json m = read_json(dir / "manifest.json");
  const Scenario s = scenario_from_json(m.at("scenario"));
  const std::string hash = m.at("config_hash");
  check(config_hash(s) == hash, "manifest hash re-derived from the recorded scenario");
  if (expected) check(config_hash(*expected) == hash, "run hash matches the supplied config");
  if (m.value("status", "") != "ok") {
    rep.problems.push_back("run ended with an error: " + m["error"].value("message", "?"));
    return rep;
  }

  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  const Grid grid(s.dim, s.n, s.L);
  for (const auto& p : files) {
    const std::string name = fs::relative(p, dir).string();
    try {
      if (p.extension() == ".csv") {
        check(read_table(p).config_hash == hash, name + " config hash");
      } else if (p.extension() == ".psiwf") {
        const WaveFunction psi = read_snapshot(p);
        check(psi.grid() == grid, name + " grid matches the scenario");
        check(read_sidecar(p).value("config_hash", "") == hash, name + " sidecar config hash");
      } else if (p.extension() == ".json" && p.filename() != "manifest.json" &&
                 p.string().find(".psiwf.json") == std::string::npos) {
        check(read_json(p).value("config_hash", "") == hash, name + " config hash");
      }
    } catch (const std::exception& e) {
      rep.problems.push_back(name + ": " + e.what());
    }
  }

  const RunTables run = load_tables(dir, hash, m.at("derived"));
  const json fits = compute_fits(s, run);
  check(fits == read_json(dir / "fits.json").at("fits"), "fits recomputed from the CSV series");
  json vs = json::array();
  for (const auto& v : evaluate_verdicts(s, run, fits)) vs.push_back(to_json(v));
  check(vs == read_json(dir / "verdicts.json").at("verdicts"), "verdicts recomputed from the CSV series");
  return rep;
}

std::vector<fs::path> write_report(const fs::path& dir) {
  std::vector<fs::path> written;
  const json m = read_json(dir / "manifest.json");
  const std::string hash = m.at("config_hash");

  // Long format t, x, |psi| from the 1D snapshot series.
  std::vector<std::pair<double, fs::path>> snaps;
  if (fs::exists(dir / "snapshots"))
    for (const auto& e : fs::directory_iterator(dir / "snapshots"))
      if (e.path().extension() == ".psiwf") snaps.emplace_back(read_sidecar(e.path()).at("time"), e.path());
  std::sort(snaps.begin(), snaps.end());
  if (!snaps.empty() && m["scenario"]["grid"]["dim"] == 1) {
    std::vector<double> t, x, a;
    for (const auto& [time, path] : snaps) {
      const WaveFunction psi = read_snapshot(path);
      for (std::size_t i = 0; i < psi.size(); ++i) {
        t.push_back(time);
        x.push_back(psi.grid().coordinate(i));
        a.push_back(std::abs(psi[i]));
      }
    }
    Table heat;
    heat.add("t", t);
    heat.add("x", x);
    heat.add("abs_psi", a);
    write_table(dir / "cone_heatmap.csv", heat, hash);
    written.push_back(dir / "cone_heatmap.csv");
  }

  if (fs::exists(dir / "fits.json")) {
    const json fits = read_json(dir / "fits.json").at("fits");
    std::ofstream out(dir / "fits.csv");
    out << "# config_hash: " << hash << "\n";
    out << "name,exponent,amplitude,r2,t_lo,t_hi,samples\n";
    for (auto it = fits.begin(); it != fits.end(); ++it) {
      const json& f = it.value();
      out << it.key() << "," << format_double(num_of(f["exponent"])) << "," << format_double(num_of(f["amplitude"]))
          << "," << format_double(num_of(f["r2"])) << "," << format_double(num_of(f["window"][0])) << ","
          << format_double(num_of(f["window"][1])) << "," << f["samples"].get<int>() << "\n";
    }
    written.push_back(dir / "fits.csv");
  }

  if (m.contains("derived") && m["derived"].contains("datum")) {
    const json& d = m["derived"]["datum"];
    Table c;
    std::vector<double> it, inc, ratio, cert;
    const auto& increments = d["increments"];
    for (std::size_t i = 0; i < increments.size(); ++i) {
      it.push_back(static_cast<double>(i + 1));
      inc.push_back(increments[i]);
      ratio.push_back(i == 0 ? kNaN : num_of(increments[i]) / num_of(increments[i - 1]));
      cert.push_back(num_of(d["certificates"][i]["bound"]));
    }
    c.add("iteration", it);
    c.add("increment", inc);
    c.add("ratio", ratio);
    c.add("certificate", cert);
    write_table(dir / "contraction.csv", c, hash);
    written.push_back(dir / "contraction.csv");
  }
  return written;
}

}  // namespace hlc
