#include "hlc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "hlc/errors.hpp"

namespace hlc {

using nlohmann::json;

namespace {

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::linear_cone, "linear_cone"},
    {ExperimentKind::hartree_cone, "hartree_cone"},
    {ExperimentKind::nls_cone, "nls_cone"},
    {ExperimentKind::decay_rates, "decay_rates"},
    {ExperimentKind::datagen_probe, "datagen_probe"},
    {ExperimentKind::kbound_validation, "kbound_validation"},
    {ExperimentKind::sharpness, "sharpness"},
};

json number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json numbers(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

double to_double(const json& j, const std::string& path) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw InvalidParameter(path + ": expected a number, got " + j.dump());
}

std::vector<double> to_doubles(const json& j, const std::string& path) {
  if (!j.is_array()) throw InvalidParameter(path + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(to_double(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json cone_json(const ConeConfig& c) {
  return {{"c_multiplier", c.c_multiplier}, {"a", c.a}, {"expect", c.expect}};
}

bool compatible(const json& def, const json& user) {
  if (def.is_null()) return user.is_null() || user.is_number();
  if (def.is_number_integer() || def.is_number_unsigned()) {
    if (user.is_number_integer() || user.is_number_unsigned()) return true;
    return user.is_number_float() && std::floor(user.get<double>()) == user.get<double>();
  }
  if (def.is_number()) return user.is_number() || (user.is_string() && (user == "inf" || user == "-inf"));
  if (def.is_string()) return user.is_string();
  if (def.is_boolean()) return user.is_boolean();
  if (def.is_array()) return user.is_array();
  if (def.is_object()) return user.is_object();
  return false;
}

/// Overlays `user` on `def`, rejecting keys the schema does not know.
json merge_strict(const json& def, const json& user, const std::string& path) {
  if (!compatible(def, user)) throw InvalidParameter(path + ": expected " + def.type_name() + ", got " + user.dump());
  if (def.is_number_integer() && user.is_number_float()) return static_cast<std::int64_t>(user.get<double>());
  if (!def.is_object()) return user;
  json out = def;
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!def.contains(it.key())) throw InvalidParameter("unknown config key '" + key + "'");
    if (it.key() == "cones") {
      json cones = json::array();
      for (const auto& c : it.value()) cones.push_back(merge_strict(cone_json(ConeConfig{}), c, key + "[]"));
      out[it.key()] = cones;
    } else {
      out[it.key()] = merge_strict(def[it.key()], it.value(), key);
    }
  }
  return out;
}

json from_toml(const toml::node& node) {
  if (auto t = node.as_table()) {
    json o = json::object();
    for (const auto& [k, v] : *t) o[std::string(k.str())] = from_toml(v);
    return o;
  }
  if (auto a = node.as_array()) {
    json arr = json::array();
    for (const auto& v : *a) arr.push_back(from_toml(v));
    return arr;
  }
  if (auto v = node.as_integer()) return v->get();
  if (auto v = node.as_floating_point()) return number(v->get());
  if (auto v = node.as_boolean()) return v->get();
  if (auto v = node.as_string()) return v->get();
  throw InvalidParameter("unsupported TOML value (dates and times are not part of the schema)");
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

ExperimentKind parse_kind(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (name == n) return k;
  throw InvalidParameter("unknown experiment kind '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, n] : kKindNames)
    if (k == kind) return n;
  return "unknown";
}

json to_json(const Scenario& s) {
  json cones = json::array();
  for (const auto& c : s.cones) cones.push_back(cone_json(c));
  const auto& V = s.potential;
  const auto& v = s.pair;
  return {
      {"schema", kScenarioSchema},
      {"kind", to_string(s.kind)},
      {"seed", s.seed},
      {"grid", {{"dim", s.dim}, {"n", s.n}, {"L", s.L}}},
      {"potential",
       {{"family", to_string(V.family)},
        {"amplitude", V.amplitude},
        {"decay_rate", V.decay_rate},
        {"width", V.width},
        {"shield_amplitude", V.shield_amplitude},
        {"shield_width", V.shield_width},
        {"alpha", V.alpha},
        {"delta", V.delta},
        {"positive_constant", V.positive_constant}}},
      {"pair",
       {{"family", to_string(v.family)},
        {"amplitude", v.amplitude},
        {"width", v.width},
        {"decay", v.decay},
        {"q", v.lq_index},
        {"gamma", v.smoothness_index}}},
      {"window", {{"lo", s.plateau_lo}, {"hi", s.plateau_hi}, {"shoulder", s.shoulder}}},
      {"kbound", {{"shoulders", numbers(s.kbound_shoulders)}, {"tol", s.kbound_tol}}},
      {"data",
       {{"mode", s.data_mode},
        {"seed_width", s.seed_width},
        {"seed_momentum", s.seed_momentum},
        {"seed_center", s.seed_center},
        {"b", s.b},
        {"epsilon", s.epsilon},
        {"s", s.s},
        {"gamma", s.gamma},
        {"fp_tol", s.fp_tol},
        {"max_iters", s.max_iters},
        {"tau_max", s.tau_max},
        {"tol_tail", s.tol_tail},
        {"cheb_tol", s.cheb_tol},
        {"dt", s.data_dt}}},
      {"evolution",
       {{"T", s.T},
        {"dt", s.dt},
        {"record_stride", s.record_stride},
        {"drift_tolerance", s.drift_tolerance},
        {"nls_sigma", s.nls_sigma},
        {"nls_coupling", s.nls_coupling}}},
      {"observables",
       {{"p", numbers(s.p_list)},
        {"fit_t_lo", s.fit_t_lo},
        {"tail_exponent_max", s.tail_exponent_max},
        {"escape_exponent_min", s.escape_exponent_min},
        {"linf_exponent", number(s.linf_exponent)},
        {"linf_tol", s.linf_tol},
        {"w_ratio_tol", s.w_ratio_tol}}},
      {"cones", cones},
      {"propagation",
       {{"enabled", s.propagation},
        {"v_multiplier", s.prop_v_multiplier},
        {"c_multiplier", s.prop_c_multiplier},
        {"a", s.prop_a},
        {"s", s.prop_s}}},
      {"output", {{"snapshots", s.snapshots}}},
      {"sweep", {{"axis", s.sweep_axis}, {"values", numbers(s.sweep_values)}}},
  };
}

Scenario scenario_from_json(const json& user) {
  if (!user.is_object()) throw InvalidParameter("config root must be a table");
  if (user.contains("schema") && user["schema"] != kScenarioSchema)
    throw InvalidParameter("unsupported schema " + user["schema"].dump() + ", expected \"" + kScenarioSchema + "\"");
  const json j = merge_strict(to_json(Scenario{}), user, "");

  Scenario s;
  s.kind = parse_kind(j["kind"]);
  s.seed = j["seed"].get<std::uint64_t>();
  s.dim = j["grid"]["dim"];
  s.n = j["grid"]["n"];
  s.L = j["grid"]["L"];

  const json& V = j["potential"];
  s.potential.family = parse_external_family(V["family"]);
  s.potential.amplitude = V["amplitude"];
  s.potential.decay_rate = V["decay_rate"];
  s.potential.width = V["width"];
  s.potential.shield_amplitude = V["shield_amplitude"];
  s.potential.shield_width = V["shield_width"];
  s.potential.alpha = V["alpha"];
  s.potential.delta = V["delta"];
  s.potential.positive_constant = V["positive_constant"];

  const json& v = j["pair"];
  s.pair.family = parse_pair_family(v["family"]);
  s.pair.amplitude = v["amplitude"];
  s.pair.width = v["width"];
  s.pair.decay = v["decay"];
  s.pair.lq_index = v["q"];
  s.pair.smoothness_index = v["gamma"];

  s.plateau_lo = j["window"]["lo"];
  s.plateau_hi = j["window"]["hi"];
  s.shoulder = j["window"]["shoulder"];
  s.kbound_shoulders = to_doubles(j["kbound"]["shoulders"], "kbound.shoulders");
  s.kbound_tol = j["kbound"]["tol"];

  const json& d = j["data"];
  s.data_mode = d["mode"];
  s.seed_width = d["seed_width"];
  s.seed_momentum = d["seed_momentum"];
  s.seed_center = d["seed_center"];
  s.b = d["b"];
  s.epsilon = d["epsilon"];
  s.s = d["s"];
  s.gamma = d["gamma"];
  s.fp_tol = d["fp_tol"];
  s.max_iters = d["max_iters"];
  s.tau_max = d["tau_max"];
  s.tol_tail = d["tol_tail"];
  s.cheb_tol = d["cheb_tol"];
  s.data_dt = d["dt"];

  const json& e = j["evolution"];
  s.T = e["T"];
  s.dt = e["dt"];
  s.record_stride = e["record_stride"];
  s.drift_tolerance = e["drift_tolerance"];
  s.nls_sigma = e["nls_sigma"];
  s.nls_coupling = e["nls_coupling"];

  const json& o = j["observables"];
  s.p_list = to_doubles(o["p"], "observables.p");
  s.fit_t_lo = o["fit_t_lo"];
  s.tail_exponent_max = o["tail_exponent_max"];
  s.escape_exponent_min = o["escape_exponent_min"];
  s.linf_exponent = to_double(o["linf_exponent"], "observables.linf_exponent");
  s.linf_tol = o["linf_tol"];
  s.w_ratio_tol = o["w_ratio_tol"];

  s.cones.clear();
  for (const auto& c : j["cones"]) s.cones.push_back({c["c_multiplier"], c["a"], c["expect"]});

  const json& p = j["propagation"];
  s.propagation = p["enabled"];
  s.prop_v_multiplier = p["v_multiplier"];
  s.prop_c_multiplier = p["c_multiplier"];
  s.prop_a = p["a"];
  s.prop_s = p["s"];

  s.snapshots = j["output"]["snapshots"];
  s.sweep_axis = j["sweep"]["axis"];
  s.sweep_values = to_doubles(j["sweep"]["values"], "sweep.values");
  validate(s);
  return s;
}

json toml_to_json(const std::string& text, const std::string& source) {
  try {
    return from_toml(toml::parse(text, source));
  } catch (const toml::parse_error& err) {
    std::ostringstream msg;
    msg << source << ":" << err.source().begin.line << ":" << err.source().begin.column << ": "
        << err.description();
    throw InvalidParameter(msg.str());
  }
}

Scenario parse_scenario(const std::string& toml_text) { return scenario_from_json(toml_to_json(toml_text)); }

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(toml_to_json(buf.str(), path.string()));
}

std::string config_hash(const Scenario& s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(s).dump())));
  return buf;
}

Scenario with_override(const Scenario& base, const std::string& path, double value) {
  json j = to_json(base);
  json* node = &j;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part))
      throw InvalidParameter("sweep axis '" + path + "' does not resolve in the config schema");
    node = &(*node)[part];
  }
  if (node->is_object() || node->is_array() || node->is_string())
    throw InvalidParameter("sweep axis '" + path + "' is not a numeric field");
  if (node->is_boolean()) {
    *node = value != 0.0;
  } else if (node->is_number_integer() || node->is_number_unsigned()) {
    if (std::floor(value) != value) throw InvalidParameter("sweep axis '" + path + "' takes integer values");
    *node = static_cast<std::int64_t>(value);
  } else {
    *node = number(value);
  }
  return scenario_from_json(j);
}

void validate(const Scenario& s) {
  std::vector<std::string> bad;
  auto need = [&](bool ok, const char* what) {
    if (!ok) bad.emplace_back(what);
  };
  need(s.dim >= 1 && s.dim <= 3, "grid.dim must be 1, 2 or 3");
  need(s.n >= 8, "grid.n must be >= 8");
  need(s.L > 0.0, "grid.L must be > 0");
  need(s.shoulder > 0.0, "window.shoulder must be > 0");
  need(s.plateau_lo <= s.plateau_hi, "window.lo must be <= window.hi");
  need(s.kbound_tol > 0.0, "kbound.tol must be > 0");
  for (double d : s.kbound_shoulders) need(d > 0.0, "kbound.shoulders must be > 0");
  need(s.data_mode == "datum" || s.data_mode == "seed", "data.mode must be \"datum\" or \"seed\"");
  need(s.seed_width > 0.0, "data.seed_width must be > 0");
  need(s.b > 0.0, "data.b must be > 0");
  need(s.epsilon > 0.0, "data.epsilon must be > 0");
  need(s.fp_tol > 0.0, "data.fp_tol must be > 0");
  need(s.max_iters >= 1, "data.max_iters must be >= 1");
  need(s.tau_max >= 1.0, "data.tau_max must be >= 1");
  need(s.tol_tail > 0.0, "data.tol_tail must be > 0");
  need(s.cheb_tol > 0.0, "data.cheb_tol must be > 0");
  need(s.data_dt > 0.0, "data.dt must be > 0");
  need(s.T > 0.0, "evolution.T must be > 0");
  need(s.dt > 0.0, "evolution.dt must be > 0");
  need(s.record_stride >= 1, "evolution.record_stride must be >= 1");
  need(s.drift_tolerance > 0.0, "evolution.drift_tolerance must be > 0");
  need(s.nls_sigma > 0.0, "evolution.nls_sigma must be > 0");
  for (double p : s.p_list) need(p >= 1.0, "observables.p entries must be >= 1");
  need(s.fit_t_lo >= 0.0 && s.fit_t_lo < s.T, "observables.fit_t_lo must lie in [0, T)");
  for (const auto& c : s.cones) {
    need(c.c_multiplier > 0.0, "cones.c_multiplier must be > 0");
    need(c.a > 0.0, "cones.a must be > 0");
    need(c.expect == "decay" || c.expect == "escape", "cones.expect must be \"decay\" or \"escape\"");
  }
  need(s.prop_c_multiplier > s.prop_v_multiplier, "propagation.c_multiplier must exceed v_multiplier");
  need(s.prop_s >= 0.0, "propagation.s must be >= 0");
  need(s.snapshots >= 0, "output.snapshots must be >= 0");
  for (double v : s.sweep_values) need(std::isfinite(v), "sweep.values must be finite");
  if (s.kind == ExperimentKind::kbound_validation) need(!s.kbound_shoulders.empty(), "kbound.shoulders is empty");
  if (s.kind == ExperimentKind::decay_rates) {
    bool has_inf = false;
    for (double p : s.p_list) has_inf = has_inf || std::isinf(p);
    need(has_inf, "decay_rates needs inf in observables.p");
  }
  if (bad.empty()) return;
  std::string msg = "invalid scenario:";
  for (const auto& b : bad) msg += "\n  " + b;
  throw InvalidParameter(msg);
}

}  // namespace hlc
