#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hlc/potentials.hpp"

namespace hlc {

inline constexpr const char* kScenarioSchema = "hlc-scenario/1";

enum class ExperimentKind {
  linear_cone,
  hartree_cone,
  nls_cone,
  decay_rates,
  datagen_probe,
  kbound_validation,
  sharpness,
};

ExperimentKind parse_kind(const std::string& name);
std::string to_string(ExperimentKind kind);

struct ConeConfig {
  /// c = c_multiplier * reference speed (k_I, or sqrt(2 E2) for sharpness runs).
  double c_multiplier = 1.25;
  double a = 18.0;
  /// "decay": exponent <= tail_exponent_max; "escape": exponent > escape_exponent_min.
  std::string expect = "decay";
};

/// One experiment. Every field has a default; the TOML file overrides a subset.
struct Scenario {
  ExperimentKind kind = ExperimentKind::linear_cone;
  /// Seed for all randomized estimators.
  std::uint64_t seed = 0xc0ffee;

  int dim = 1;
  std::size_t n = 1024;
  double L = 512.0;

  ExternalPotentialSpec potential{};
  PairPotentialSpec pair{};

  /// g is 1 on [plateau_lo, plateau_hi] with shoulders of this width on each side.
  double plateau_lo = 0.25;
  double plateau_hi = 1.25;
  double shoulder = 0.2;

  std::vector<double> kbound_shoulders{0.2, 0.1, 0.05};
  double kbound_tol = 1e-10;

  /// "datum": construct_datum output; "seed": the seed profile scaled to H^s norm epsilon.
  std::string data_mode = "datum";
  double seed_width = 3.0;
  double seed_momentum = 0.8;
  double seed_center = 0.0;
  double b = 12.0;
  double epsilon = 0.05;
  double s = 1.0;
  double gamma = 1.0;
  double fp_tol = 1e-8;
  int max_iters = 10;
  double tau_max = 60.0;
  double tol_tail = 1e-5;
  double cheb_tol = 1e-12;
  double data_dt = 0.01;

  double T = 40.0;
  double dt = 0.01;
  int record_stride = 10;
  double drift_tolerance = 1e-6;
  double nls_sigma = 1.0;
  double nls_coupling = 1.0;

  std::vector<double> p_list{2.0, 4.0, std::numeric_limits<double>::infinity()};
  double fit_t_lo = 5.0;
  double tail_exponent_max = -0.4;
  double escape_exponent_min = -0.1;
  /// NaN selects the free dispersion rate -d/2.
  double linf_exponent = std::numeric_limits<double>::quiet_NaN();
  double linf_tol = 0.05;
  double w_ratio_tol = 0.1;
  std::vector<ConeConfig> cones{ConeConfig{}};

  bool propagation = false;
  /// v = v_multiplier * k_I and profile width c - v with c = c_multiplier * k_I.
  double prop_v_multiplier = 1.25;
  double prop_c_multiplier = 2.0;
  double prop_a = 18.0;
  /// 0 selects s = T.
  double prop_s = 0.0;

  int snapshots = 16;

  std::string sweep_axis;
  std::vector<double> sweep_values;
};

/// Canonical JSON: nested sections, every field present, infinities as "inf"
/// and NaN as null.
nlohmann::json to_json(const Scenario& s);
/// Strict inverse: unknown keys and wrong types are errors; missing keys take defaults.
Scenario scenario_from_json(const nlohmann::json& j);

/// TOML text or file to the same JSON shape (tables to objects, inf kept as "inf").
nlohmann::json toml_to_json(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& toml_text);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const Scenario& s);

/// Sets a dotted path ("data.epsilon", "pair.amplitude") that exists in the
/// schema and reparses.
Scenario with_override(const Scenario& base, const std::string& path, double value);

/// Throws InvalidParameter listing every violated constraint.
void validate(const Scenario& s);

}  // namespace hlc
