#pragma once

// Run configuration: strict JSON schema with resolved-defaults echo.
//
// Keys (unknown keys are rejected):
//   experiment            string, free-form run label            (default "run")
//   dimension             1 | 2                                  (default 1)
//   L                     int or array of ints, each >= 2        (required)
//   boundary              "periodic" | "open"                    (default "periodic")
//   p                     number or array, each in [0,1]         (required)
//   scheme                "fixed" | "dilute" | "random_uniform"  (default "fixed")
//   theta_units_pi4       int, angle in units of pi/4            (default 1; exact)
//   theta_radians         number, angle in radians               (excludes the above)
//   q                     number in [0,1] | "2/L" | "2/N"        (dilute only, default 0.5)
//   t_max                 int >= 1 | "auto"                      (default "auto": 2L in 1D, L in 2D)
//   t_window              [t_from, t_to], steady-state average   (default absent: final step only)
//   n_traj                int >= 1                               (required)
//   master_seed           unsigned int                           (default 1)
//   mode                  "auto" | "full" | "parity"             (default "auto")
//   measure               "auto" | "t_unit" | "nullity" | "sre2" (default "auto")
//   observables           array of observable id strings         (default ["magic_density"])
//   initial_phase         {"units_pi4": k} | {"radians": x}      (default: scheme angle for
//                                                                 fixed, 0 for dilute/random)
//   workers               int >= 1                               (default $RBCSIM_WORKERS,
//                                                                 else hardware concurrency)
//   record_trajectories   bool, per-trajectory JSON-lines        (default false)
//   out_dir               string                                 (default "out")

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rbcsim/circuit.hpp"
#include "rbcsim/errors.hpp"
#include "rbcsim/io.hpp"
#include "rbcsim/lattice.hpp"
#include "rbcsim/observables.hpp"
#include "rbcsim/phase.hpp"
#include "rbcsim/scheme.hpp"

namespace rbcsim {

// Dilution rate: a literal number, or a formula tied to the lattice size.
struct QSpec {
  enum class Kind { number, two_over_l, two_over_n };
  Kind kind = Kind::number;
  double value = 0.5;

  double resolve(const Lattice& lat) const {
    switch (kind) {
      case Kind::number:
        return value;
      case Kind::two_over_l:
        return 2.0 / static_cast<double>(lat.length());
      case Kind::two_over_n:
        return 2.0 / static_cast<double>(lat.n_sites);
    }
    return value;
  }

  nlohmann::json to_json() const {
    if (kind == Kind::two_over_l) return "2/L";
    if (kind == Kind::two_over_n) return "2/N";
    return value;
  }
};

struct RunConfig {
  std::string experiment = "run";
  uint32_t dimension = 1;
  std::vector<uint32_t> sizes;
  Boundary boundary = Boundary::periodic;
  std::vector<double> rates;
  AngleScheme::Kind scheme_kind = AngleScheme::Kind::fixed;
  PhaseValue theta = PhaseValue::exact(1);
  QSpec q;
  std::optional<uint64_t> t_max;  // nullopt = auto
  std::optional<std::pair<uint32_t, uint32_t>> t_window;
  uint32_t n_traj = 0;
  uint64_t master_seed = 1;
  EngineMode mode = EngineMode::parity;
  MagicMeasure measure = MagicMeasure::t_unit;
  std::vector<ObservableId> observables{ObservableId::magic_density};
  PhaseValue initial_phase = PhaseValue::exact(1);
  uint32_t workers = 1;
  bool record_trajectories = false;
  std::string out_dir = "out";

  uint32_t t_max_for(uint32_t length) const {
    if (t_max) return static_cast<uint32_t>(*t_max);
    return dimension == 1 ? 2 * length : length;
  }

  AngleScheme scheme_for(const Lattice& lat) const {
    switch (scheme_kind) {
      case AngleScheme::Kind::fixed:
        return AngleScheme::fixed(theta);
      case AngleScheme::Kind::dilute:
        return AngleScheme::dilute(theta, q.resolve(lat));
      case AngleScheme::Kind::random_uniform:
        return AngleScheme::random_uniform();
    }
    return AngleScheme::fixed(theta);
  }

  // Circuit parameters for one (L, p) grid cell. The plan measures at the
  // final step, or averages over t_window when configured.
  CircuitParams params_for(uint32_t length, double p) const {
    CircuitParams cp;
    cp.lattice = build_lattice({dimension, length, boundary});
    cp.p = p;
    cp.scheme = scheme_for(cp.lattice);
    uint32_t tm = t_max_for(length);
    if (t_window) {
      auto [from, to] = *t_window;
      if (to > tm)
        throw ConfigError("t_window end " + std::to_string(to) +
                          " exceeds t_max " + std::to_string(tm));
      cp.plan = EvalPlan::window(from, to);
    } else {
      cp.plan = EvalPlan::final_at(tm);
    }
    cp.observables = observables;
    cp.measure = measure;
    cp.initial_phase = initial_phase;
    cp.validate();
    return cp;
  }

  nlohmann::json resolved_json() const;
};

namespace detail {

inline const char* scheme_name(AngleScheme::Kind k) {
  switch (k) {
    case AngleScheme::Kind::fixed:
      return "fixed";
    case AngleScheme::Kind::dilute:
      return "dilute";
    case AngleScheme::Kind::random_uniform:
      return "random_uniform";
  }
  return "fixed";
}

inline uint32_t default_workers() {
  if (const char* env = std::getenv("RBCSIM_WORKERS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<uint32_t>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 1;
}

inline uint64_t require_uint(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0))
    throw ConfigError("key '" + key + "' must be a non-negative integer");
  return v.get<uint64_t>();
}

}  // namespace detail

inline nlohmann::json RunConfig::resolved_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["dimension"] = dimension;
  j["L"] = sizes;
  j["boundary"] = boundary == Boundary::periodic ? "periodic" : "open";
  j["p"] = rates;
  j["scheme"] = detail::scheme_name(scheme_kind);
  if (scheme_kind != AngleScheme::Kind::random_uniform) {
    if (theta.is_exact())
      j["theta_units_pi4"] = theta.exact_units();
    else
      j["theta_radians"] = theta.to_radians();
  }
  if (scheme_kind == AngleScheme::Kind::dilute) j["q"] = q.to_json();
  j["t_max"] = t_max ? nlohmann::json(*t_max) : nlohmann::json("auto");
  if (t_window) j["t_window"] = {t_window->first, t_window->second};
  j["n_traj"] = n_traj;
  j["master_seed"] = master_seed;
  j["mode"] = mode == EngineMode::parity ? "parity" : "full";
  j["measure"] = measure_name(measure);
  nlohmann::json obs = nlohmann::json::array();
  for (auto id : observables) obs.push_back(observable_name(id));
  j["observables"] = obs;
  if (initial_phase.is_exact())
    j["initial_phase"] = {{"units_pi4", initial_phase.exact_units()}};
  else
    j["initial_phase"] = {{"radians", initial_phase.to_radians()}};
  j["workers"] = workers;
  j["record_trajectories"] = record_trajectories;
  j["out_dir"] = out_dir;
  return j;
}

// Strict parse: unknown keys rejected, every value validated, auto modes
// resolved. Throws ConfigError on schema violations and SchemeCompatError
// when the engine mode or magic measure cannot serve the chosen scheme.
inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  static const std::vector<std::string> known = {
      "experiment",    "dimension",   "L",
      "boundary",      "p",           "scheme",
      "theta_units_pi4", "theta_radians", "q",
      "t_max",         "t_window",    "n_traj",
      "master_seed",   "mode",        "measure",
      "observables",   "initial_phase", "workers",
      "record_trajectories", "out_dir"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const auto& k : known)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("unknown config key '" + item.key() + "'");
  }

  RunConfig cfg;

  if (j.contains("experiment")) {
    if (!j["experiment"].is_string())
      throw ConfigError("'experiment' must be a string");
    cfg.experiment = j["experiment"].get<std::string>();
  }

  if (j.contains("dimension")) {
    uint64_t d = detail::require_uint(j["dimension"], "dimension");
    if (d != 1 && d != 2) throw ConfigError("'dimension' must be 1 or 2");
    cfg.dimension = static_cast<uint32_t>(d);
  }

  if (!j.contains("L")) throw ConfigError("missing required key 'L'");
  {
    const auto& v = j["L"];
    if (v.is_array()) {
      for (const auto& e : v)
        cfg.sizes.push_back(static_cast<uint32_t>(detail::require_uint(e, "L")));
    } else {
      cfg.sizes.push_back(static_cast<uint32_t>(detail::require_uint(v, "L")));
    }
    if (cfg.sizes.empty()) throw ConfigError("'L' axis is empty");
    for (uint32_t L : cfg.sizes)
      if (L < 2) throw ConfigError("'L' entries must be >= 2");
  }

  if (j.contains("boundary")) {
    std::string b = j["boundary"].is_string() ? j["boundary"].get<std::string>() : "";
    if (b == "periodic")
      cfg.boundary = Boundary::periodic;
    else if (b == "open")
      cfg.boundary = Boundary::open;
    else
      throw ConfigError("'boundary' must be \"periodic\" or \"open\"");
  }

  if (!j.contains("p")) throw ConfigError("missing required key 'p'");
  {
    const auto& v = j["p"];
    auto take = [&](const nlohmann::json& e) {
      if (!e.is_number()) throw ConfigError("'p' entries must be numbers");
      double x = e.get<double>();
      if (x < 0.0 || x > 1.0) throw ConfigError("'p' entries must lie in [0, 1]");
      cfg.rates.push_back(x);
    };
    if (v.is_array())
      for (const auto& e : v) take(e);
    else
      take(v);
    if (cfg.rates.empty()) throw ConfigError("'p' axis is empty");
  }

  if (j.contains("scheme")) {
    std::string s = j["scheme"].is_string() ? j["scheme"].get<std::string>() : "";
    if (s == "fixed")
      cfg.scheme_kind = AngleScheme::Kind::fixed;
    else if (s == "dilute")
      cfg.scheme_kind = AngleScheme::Kind::dilute;
    else if (s == "random_uniform")
      cfg.scheme_kind = AngleScheme::Kind::random_uniform;
    else
      throw ConfigError("'scheme' must be \"fixed\", \"dilute\" or \"random_uniform\"");
  }

  bool has_units = j.contains("theta_units_pi4");
  bool has_rad = j.contains("theta_radians");
  if (has_units && has_rad)
    throw ConfigError("'theta_units_pi4' and 'theta_radians' are mutually exclusive");
  if ((has_units || has_rad) && cfg.scheme_kind == AngleScheme::Kind::random_uniform)
    throw ConfigError("random_uniform scheme takes no theta");
  if (has_units) {
    if (!j["theta_units_pi4"].is_number_integer())
      throw ConfigError("'theta_units_pi4' must be an integer");
    cfg.theta = PhaseValue::exact(j["theta_units_pi4"].get<int64_t>());
  } else if (has_rad) {
    if (!j["theta_radians"].is_number())
      throw ConfigError("'theta_radians' must be a number");
    cfg.theta = PhaseValue::radians(j["theta_radians"].get<double>());
  }

  if (j.contains("q")) {
    if (cfg.scheme_kind != AngleScheme::Kind::dilute)
      throw ConfigError("'q' applies only to the dilute scheme");
    const auto& v = j["q"];
    if (v.is_string()) {
      std::string s = v.get<std::string>();
      if (s == "2/L")
        cfg.q.kind = QSpec::Kind::two_over_l;
      else if (s == "2/N")
        cfg.q.kind = QSpec::Kind::two_over_n;
      else
        throw ConfigError("'q' string must be \"2/L\" or \"2/N\"");
    } else if (v.is_number()) {
      double x = v.get<double>();
      if (x < 0.0 || x > 1.0) throw ConfigError("'q' must lie in [0, 1]");
      cfg.q.kind = QSpec::Kind::number;
      cfg.q.value = x;
    } else {
      throw ConfigError("'q' must be a number or \"2/L\" / \"2/N\"");
    }
  }

  if (j.contains("t_max")) {
    const auto& v = j["t_max"];
    if (v.is_string()) {
      if (v.get<std::string>() != "auto")
        throw ConfigError("'t_max' must be an integer or \"auto\"");
    } else {
      uint64_t t = detail::require_uint(v, "t_max");
      if (t < 1) throw ConfigError("'t_max' must be >= 1");
      cfg.t_max = t;
    }
  }

  if (j.contains("t_window")) {
    const auto& v = j["t_window"];
    if (!v.is_array() || v.size() != 2)
      throw ConfigError("'t_window' must be [t_from, t_to]");
    uint64_t from = detail::require_uint(v[0], "t_window");
    uint64_t to = detail::require_uint(v[1], "t_window");
    if (from < 1 || from > to)
      throw ConfigError("'t_window' needs 1 <= t_from <= t_to");
    cfg.t_window = {static_cast<uint32_t>(from), static_cast<uint32_t>(to)};
  }

  if (!j.contains("n_traj")) throw ConfigError("missing required key 'n_traj'");
  cfg.n_traj = static_cast<uint32_t>(detail::require_uint(j["n_traj"], "n_traj"));
  if (cfg.n_traj < 1) throw ConfigError("'n_traj' must be >= 1");

  if (j.contains("master_seed"))
    cfg.master_seed = detail::require_uint(j["master_seed"], "master_seed");

  if (j.contains("observables")) {
    const auto& v = j["observables"];
    if (!v.is_array() || v.empty())
      throw ConfigError("'observables' must be a non-empty array");
    cfg.observables.clear();
    for (const auto& e : v) {
      if (!e.is_string()) throw ConfigError("'observables' entries must be strings");
      try {
        cfg.observables.push_back(observable_from_name(e.get<std::string>()));
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
      }
    }
  }

  bool wants_topo = false;
  for (auto id : cfg.observables)
    if (id == ObservableId::topo_magic) wants_topo = true;
  if (wants_topo) {
    if (cfg.dimension != 1)
      throw ConfigError("topo_magic needs a 1D chain");
    for (uint32_t L : cfg.sizes)
      if (L % 4 != 0)
        throw ConfigError("topo_magic needs L divisible by 4, got " + std::to_string(L));
  }

  if (j.contains("initial_phase")) {
    const auto& v = j["initial_phase"];
    bool u = v.is_object() && v.contains("units_pi4");
    bool r = v.is_object() && v.contains("radians");
    if (u == r || v.size() != 1)
      throw ConfigError("'initial_phase' must be {\"units_pi4\": k} or {\"radians\": x}");
    if (u) {
      if (!v["units_pi4"].is_number_integer())
        throw ConfigError("'initial_phase.units_pi4' must be an integer");
      cfg.initial_phase = PhaseValue::exact(v["units_pi4"].get<int64_t>());
    } else {
      if (!v["radians"].is_number())
        throw ConfigError("'initial_phase.radians' must be a number");
      cfg.initial_phase = PhaseValue::radians(v["radians"].get<double>());
    }
  } else {
    cfg.initial_phase = cfg.scheme_kind == AngleScheme::Kind::fixed
                            ? cfg.theta
                            : PhaseValue::exact(0);
  }

  // Parity mode tracks only sizes; it is honest exactly when every angle is
  // a fixed odd multiple of pi/4 and the initial phase is one too.
  AngleScheme probe = cfg.scheme_kind == AngleScheme::Kind::dilute
                          ? AngleScheme::dilute(cfg.theta, 0.5)
                          : (cfg.scheme_kind == AngleScheme::Kind::fixed
                                 ? AngleScheme::fixed(cfg.theta)
                                 : AngleScheme::random_uniform());
  bool parity_ok = probe.parity_compatible() && cfg.initial_phase.is_exact() &&
                   cfg.initial_phase.exact_units() % 2 == 1;

  std::string mode = "auto";
  if (j.contains("mode")) {
    if (!j["mode"].is_string())
      throw ConfigError("'mode' must be \"auto\", \"full\" or \"parity\"");
    mode = j["mode"].get<std::string>();
  }
  if (mode == "auto") {
    cfg.mode = parity_ok ? EngineMode::parity : EngineMode::full;
  } else if (mode == "full") {
    cfg.mode = EngineMode::full;
  } else if (mode == "parity") {
    if (!parity_ok)
      throw SchemeCompatError(
          "parity mode needs the fixed scheme with theta and initial phase "
          "both odd multiples of pi/4");
    cfg.mode = EngineMode::parity;
  } else {
    throw ConfigError("'mode' must be \"auto\", \"full\" or \"parity\"");
  }

  std::string measure = "auto";
  if (j.contains("measure")) {
    if (!j["measure"].is_string())
      throw ConfigError("'measure' must be \"auto\", \"t_unit\", \"nullity\" or \"sre2\"");
    measure = j["measure"].get<std::string>();
  }
  if (measure == "auto") {
    cfg.measure = probe.exact_protocol() && cfg.initial_phase.is_exact()
                      ? MagicMeasure::t_unit
                      : MagicMeasure::nullity;
  } else if (measure == "t_unit") {
    if (cfg.scheme_kind == AngleScheme::Kind::random_uniform)
      throw SchemeCompatError("t_unit measure is undefined for random angles");
    cfg.measure = MagicMeasure::t_unit;
  } else if (measure == "nullity") {
    cfg.measure = MagicMeasure::nullity;
  } else if (measure == "sre2") {
    cfg.measure = MagicMeasure::stabilizer_renyi2;
  } else {
    throw ConfigError("'measure' must be \"auto\", \"t_unit\", \"nullity\" or \"sre2\"");
  }

  if (j.contains("workers")) {
    uint64_t w = detail::require_uint(j["workers"], "workers");
    if (w < 1) throw ConfigError("'workers' must be >= 1");
    cfg.workers = static_cast<uint32_t>(w);
  } else {
    cfg.workers = detail::default_workers();
  }

  if (j.contains("record_trajectories")) {
    if (!j["record_trajectories"].is_boolean())
      throw ConfigError("'record_trajectories' must be a boolean");
    cfg.record_trajectories = j["record_trajectories"].get<bool>();
  }

  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) throw ConfigError("'out_dir' must be a string");
    cfg.out_dir = j["out_dir"].get<std::string>();
  }

  // Mode and window sanity against every grid cell up front, so a sweep
  // cannot die halfway through on a bad combination.
  for (uint32_t L : cfg.sizes) {
    uint32_t tm = cfg.t_max_for(L);
    if (cfg.t_window && cfg.t_window->second > tm)
      throw ConfigError("t_window end exceeds t_max for L=" + std::to_string(L));
  }

  return cfg;
}

// Identifies the physics of a run: everything that influences computed
// numbers, nothing that only affects where or how they are written. Used to
// decide whether cached sweep cells are reusable.
inline uint64_t config_digest(const RunConfig& cfg) {
  nlohmann::json j = cfg.resolved_json();
  j.erase("experiment");
  j.erase("out_dir");
  j.erase("workers");
  j.erase("record_trajectories");
  std::string s = j.dump();
  uint64_t h = 1469598103934665603ull;  // FNV-1a, stable across builds
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline RunConfig load_config(const std::string& path) {
  nlohmann::json j = read_json(path);
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

}  // namespace rbcsim
