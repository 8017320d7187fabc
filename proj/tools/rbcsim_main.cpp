// rbcsim: ensembles of measurement-only circuits on rotated Bell clusters.
//
// Subcommands: run, sweep, dynamics, fit, collapse, validate, recipe.
// Exit codes: 0 success, 1 runtime or validation failure, 2 bad config,
// 3 engine/scheme mismatch, 4 missing input file.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <rbcsim/rbcsim.hpp>

namespace fs = std::filesystem;
using namespace rbcsim;

namespace {

// CLI flags that override config-file keys. Overrides are spliced into the
// JSON before parsing so the strict validator sees final values.
struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<uint64_t> master_seed;
  std::optional<uint32_t> n_traj;
  std::optional<uint32_t> workers;
  std::optional<std::string> mode;
  std::vector<uint32_t> sizes;
  std::vector<double> rates;
};

void add_override_flags(CLI::App* sub, std::string& config_path, Overrides& o) {
  sub->add_option("-c,--config", config_path, "config file (JSON)")->required();
  sub->add_option("-o,--out", o.out_dir, "output directory (overrides out_dir)");
  sub->add_option("--seed", o.master_seed, "master seed (overrides master_seed)");
  sub->add_option("--n-traj", o.n_traj, "trajectory count (overrides n_traj)");
  sub->add_option("--workers", o.workers, "worker threads (overrides workers)");
  sub->add_option("--mode", o.mode, "engine: auto | full | parity");
  sub->add_option("--L", o.sizes, "size axis (overrides L)");
  sub->add_option("--p", o.rates, "rate axis (overrides p)");
}

RunConfig load_with_overrides(const std::string& path, const Overrides& o) {
  nlohmann::json j = read_json(path);
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  if (o.out_dir) j["out_dir"] = *o.out_dir;
  if (o.master_seed) j["master_seed"] = *o.master_seed;
  if (o.n_traj) j["n_traj"] = *o.n_traj;
  if (o.workers) j["workers"] = *o.workers;
  if (o.mode) j["mode"] = *o.mode;
  if (!o.sizes.empty()) j["L"] = o.sizes;
  if (!o.rates.empty()) j["p"] = o.rates;
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

void require_single_cell(const RunConfig& cfg, const char* cmd) {
  if (cfg.sizes.size() != 1 || cfg.rates.size() != 1)
    throw ConfigError(std::string(cmd) +
                      " takes a single (L, p) cell; use sweep for grids");
}

EnsembleResult run_cell(const RunConfig& cfg, const CircuitParams& params,
                        uint64_t seed, RecordSink* sink) {
  return run_ensemble(params, cfg.mode, cfg.n_traj, seed, cfg.workers, sink);
}

std::string traj_file_name(uint32_t l_idx, uint32_t p_idx) {
  return "trajectories_L" + std::to_string(l_idx) + "_p" +
         std::to_string(p_idx) + ".jsonl";
}

int cmd_run(const std::string& config_path, const Overrides& o) {
  RunConfig cfg = load_with_overrides(config_path, o);
  require_single_cell(cfg, "run");
  CircuitParams params = cfg.params_for(cfg.sizes[0], cfg.rates[0]);

  fs::path out(cfg.out_dir);
  write_manifest(out, cfg.resolved_json(), "run");

  std::optional<JsonlRecordSink> sink;
  if (cfg.record_trajectories) sink.emplace(cfg.n_traj);
  EnsembleResult res =
      run_cell(cfg, params, cfg.master_seed, sink ? &*sink : nullptr);
  if (sink) sink->write(out / traj_file_name(0, 0));

  SweepDataset ds;
  ds.rows = ensemble_to_sweep_rows(res, cfg.sizes[0], cfg.rates[0]);
  write_sweep_csv(out / "result.csv", ds.rows);

  nlohmann::json jr;
  jr["master_seed"] = res.master_seed;
  jr["n_traj"] = res.n_traj;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : ds.rows)
    rows.push_back({{"observable", r.observable},
                    {"element", r.element},
                    {"mean", r.mean},
                    {"stderr", r.stderr_}});
  jr["results"] = rows;
  write_json(out / "result.json", jr);
  std::cout << "wrote " << (out / "result.csv").string() << "\n";
  return 0;
}

// One sweep cell on disk; reusable iff the digest of the physics matches.
nlohmann::json cell_to_json(uint64_t digest, uint32_t L, double p,
                            const EnsembleResult& res) {
  nlohmann::json j;
  j["digest"] = digest;
  j["L"] = L;
  j["p"] = p;
  j["n_traj"] = res.n_traj;
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& l : res.labels)
    labels.push_back({{"time", l.time},
                      {"observable", observable_name(l.obs)},
                      {"element", l.element}});
  j["labels"] = labels;
  j["mean"] = res.mean;
  j["stderr"] = res.stderr_;
  return j;
}

int cmd_sweep(const std::string& config_path, const Overrides& o) {
  RunConfig cfg = load_with_overrides(config_path, o);
  uint64_t digest = config_digest(cfg);

  fs::path out(cfg.out_dir);
  fs::path cells = out / "cells";
  fs::create_directories(cells);
  write_manifest(out, cfg.resolved_json(), "sweep");

  SweepDataset ds;
  const uint32_t n_p = static_cast<uint32_t>(cfg.rates.size());
  for (uint32_t il = 0; il < cfg.sizes.size(); ++il) {
    for (uint32_t ip = 0; ip < n_p; ++ip) {
      uint32_t L = cfg.sizes[il];
      double p = cfg.rates[ip];
      uint32_t cell_index = il * n_p + ip;
      uint64_t cell_seed = derive_seed(cfg.master_seed, cell_index);
      fs::path cell_path =
          cells / ("L" + std::to_string(il) + "_p" + std::to_string(ip) + ".json");

      nlohmann::json cj;
      bool cached = false;
      if (fs::exists(cell_path)) {
        cj = read_json(cell_path);
        cached = cj.value("digest", uint64_t{0}) == digest &&
                 cj.value("n_traj", uint32_t{0}) == cfg.n_traj;
      }
      if (!cached) {
        CircuitParams params = cfg.params_for(L, p);
        std::optional<JsonlRecordSink> sink;
        if (cfg.record_trajectories) sink.emplace(cfg.n_traj);
        EnsembleResult res =
            run_cell(cfg, params, cell_seed, sink ? &*sink : nullptr);
        if (sink) sink->write(out / traj_file_name(il, ip));
        cj = cell_to_json(digest, L, p, res);
        write_json_atomic(cell_path, cj);
        std::cout << "cell L=" << L << " p=" << format_double(p) << " done\n";
      } else {
        std::cout << "cell L=" << L << " p=" << format_double(p) << " cached\n";
      }

      EnsembleResult res;
      res.n_traj = cj["n_traj"].get<uint32_t>();
      for (const auto& l : cj["labels"])
        res.labels.push_back({l["time"].get<uint32_t>(),
                              observable_from_name(l["observable"].get<std::string>()),
                              l["element"].get<uint32_t>()});
      res.mean = cj["mean"].get<std::vector<double>>();
      res.stderr_ = cj["stderr"].get<std::vector<double>>();
      auto rows = ensemble_to_sweep_rows(res, L, p);
      ds.rows.insert(ds.rows.end(), rows.begin(), rows.end());
    }
  }
  ds.validate();
  write_sweep_csv(out / "sweep.csv", ds.rows);
  std::cout << "wrote " << (out / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_dynamics(const std::string& config_path, const Overrides& o,
                 uint32_t stride) {
  RunConfig cfg = load_with_overrides(config_path, o);
  require_single_cell(cfg, "dynamics");
  if (cfg.t_window)
    throw ConfigError("dynamics records every step; drop t_window");
  CircuitParams params = cfg.params_for(cfg.sizes[0], cfg.rates[0]);
  params.plan = EvalPlan::every_step(cfg.t_max_for(cfg.sizes[0]), stride);

  fs::path out(cfg.out_dir);
  write_manifest(out, cfg.resolved_json(), "dynamics");

  std::optional<JsonlRecordSink> sink;
  if (cfg.record_trajectories) sink.emplace(cfg.n_traj);
  EnsembleResult res =
      run_cell(cfg, params, cfg.master_seed, sink ? &*sink : nullptr);
  if (sink) sink->write(out / traj_file_name(0, 0));

  write_dynamics_csv(out / "dynamics.csv", ensemble_to_dynamics_rows(res));
  std::cout << "wrote " << (out / "dynamics.csv").string() << "\n";
  return 0;
}

std::vector<FitPoint> profile_points(const SweepDataset& ds,
                                     const std::string& observable, uint32_t L,
                                     double p) {
  std::vector<FitPoint> pts;
  for (const auto& r : ds.rows)
    if (r.observable == observable && r.L == L && std::abs(r.p - p) < 1e-9 &&
        r.element > 0)
      pts.push_back({static_cast<double>(r.element), r.mean, r.stderr_});
  if (pts.empty())
    throw MissingInputError("no rows for observable=" + observable + " L=" +
                            std::to_string(L) + " p=" + format_double(p));
  return pts;
}

int cmd_fit(const std::string& input, const std::string& kind,
            const std::string& observable, uint32_t L, double p,
            std::vector<double> window, const std::string& out_path) {
  if (window.size() != 0 && window.size() != 2)
    throw ConfigError("--window takes two values: lo hi");
  double lo = window.empty() ? -1 : window[0];
  double hi = window.empty() ? -1 : window[1];

  FitResult fit;
  if (kind == "profile" || kind == "area") {
    SweepDataset ds = read_sweep_csv(input);
    auto pts = profile_points(ds, observable, L, p);
    if (kind == "profile") {
      fit = fit_log_profile(pts, L, lo, hi);
    } else {
      if (window.empty()) {
        lo = 0;
        hi = static_cast<double>(L) / 4.0;
      }
      fit = fit_area_law(pts, lo, hi);
    }
  } else if (kind == "growth") {
    std::vector<FitPoint> pts;
    for (const auto& r : read_dynamics_csv(input))
      if (r.observable == observable && r.element == 0)
        pts.push_back({static_cast<double>(r.t), r.mean, r.stderr_});
    if (pts.empty())
      throw MissingInputError("no rows for observable=" + observable);
    fit = fit_time_growth(pts, lo, hi);
  } else {
    throw ConfigError("--kind must be profile, growth or area");
  }

  nlohmann::json j;
  j["kind"] = kind;
  j["observable"] = observable;
  if (kind != "growth") {
    j["L"] = L;
    j["p"] = p;
  }
  j["fit"] = fit_to_json(fit);
  write_json(out_path, j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_collapse(const std::string& input, const std::string& observable,
                 uint32_t element, double pc_lo, double pc_hi, double nu_lo,
                 double nu_hi, uint32_t grid, uint32_t refinements,
                 const std::string& out_path) {
  SweepDataset ds = read_sweep_csv(input);
  std::vector<CollapsePoint> pts;
  for (const auto& r : ds.rows)
    if (r.observable == observable && r.element == element)
      pts.push_back({r.L, r.p, r.mean, r.stderr_});
  if (pts.empty())
    throw MissingInputError("no rows for observable=" + observable);

  CollapseResult res = collapse(pts, pc_lo, pc_hi, nu_lo, nu_hi, grid, refinements);
  nlohmann::json j = collapse_to_json(res);
  j["observable"] = observable;
  j["element"] = element;
  write_json(out_path, j);
  std::cout << "pc = " << format_double(res.pc) << "  nu = " << format_double(res.nu)
            << "  quality = " << format_double(res.quality) << "\n";
  return 0;
}

int cmd_validate(uint32_t sites, uint32_t dimension, uint32_t seeds,
                 std::vector<double> rates, uint32_t steps,
                 const std::string& out_path) {
  if (rates.empty()) rates = {0.25, 0.5, 0.75};
  LatticeSpec spec;
  spec.dimension = dimension;
  spec.length = dimension == 1 ? sites : static_cast<uint32_t>(std::lround(
                                             std::sqrt(double(sites))));
  if (dimension == 2 && spec.length * spec.length != sites)
    throw ConfigError("2D validation needs a square site count");
  Lattice lat = build_lattice(spec);
  if (lat.n_sites > 12) throw ConfigError("dense oracle is capped at 12 sites");

  struct Case {
    const char* name;
    AngleScheme scheme;
    PhaseValue init;
  };
  const Case cases[] = {
      {"fixed_pi4", AngleScheme::fixed(PhaseValue::exact(1)), PhaseValue::exact(1)},
      {"fixed_0", AngleScheme::fixed(PhaseValue::exact(0)), PhaseValue::exact(0)},
      {"dilute_pi4_half", AngleScheme::dilute(PhaseValue::exact(1), 0.5),
       PhaseValue::exact(0)},
      {"random_uniform", AngleScheme::random_uniform(), PhaseValue::exact(0)},
  };

  nlohmann::json report;
  report["sites"] = lat.n_sites;
  report["seeds"] = seeds;
  report["steps"] = steps;
  nlohmann::json jcases = nlohmann::json::array();
  uint64_t failures = 0;
  uint64_t events = 0;
  for (const auto& c : cases) {
    for (double p : rates) {
      CoupledConfig cc;
      cc.lattice = lat;
      cc.p = p;
      cc.scheme = c.scheme;
      cc.initial_phase = c.init;
      cc.steps = steps;
      double max_prob_dev = 0, max_obs_dev = 0;
      double min_fid = 1;
      for (uint32_t s = 0; s < seeds; ++s) {
        CoupledResult r = coupled_run(cc, derive_seed(1, s));
        events += r.n_events;
        max_prob_dev = std::max(max_prob_dev, r.max_probability_deviation);
        max_obs_dev = std::max(max_obs_dev, r.max_observable_deviation);
        min_fid = std::min(min_fid, r.min_fidelity);
        if (!r.passed) {
          ++failures;
          jcases.push_back(r.to_json(true));
          std::cerr << "FAIL " << c.name << " p=" << format_double(p)
                    << " seed_index=" << s << ": " << r.failure << "\n";
        }
      }
      nlohmann::json jc;
      jc["scheme"] = c.name;
      jc["p"] = p;
      jc["max_probability_deviation"] = max_prob_dev;
      jc["max_observable_deviation"] = max_obs_dev;
      jc["min_fidelity"] = min_fid;
      jcases.push_back(jc);
    }
  }
  report["cases"] = jcases;
  report["events"] = events;
  report["failures"] = failures;
  report["passed"] = failures == 0;
  if (!out_path.empty()) write_json(out_path, report);
  std::cout << (failures == 0 ? "PASS" : "FAIL") << ": " << events
            << " coupled events, " << failures << " failing runs\n";
  return failures == 0 ? 0 : 1;
}

// Preset studies at desk scale; --scale multiplies trajectory counts.
struct Recipe {
  RunConfig cfg;
  bool fit_profile = false;   // log-profile fit of mutual_magic_profile
  bool fit_area = false;      // area-law fit of mutual_magic_profile
  bool dynamics = false;      // time-resolved companion run + growth fit
  bool run_collapse = false;  // collapse of topo_magic
};

Recipe make_recipe(const std::string& name, double scale) {
  auto scaled = [&](uint32_t base) {
    double v = static_cast<double>(base) * scale;
    return static_cast<uint32_t>(std::max(8.0, std::lround(v) * 1.0));
  };
  auto grid = [](double lo, double hi, uint32_t n) {
    std::vector<double> g(n);
    for (uint32_t i = 0; i < n; ++i)
      g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
  };

  Recipe r;
  RunConfig& c = r.cfg;
  c.experiment = name;
  c.workers = detail::default_workers();
  c.mode = EngineMode::parity;
  c.measure = MagicMeasure::t_unit;

  if (name == "fig3") {
    c.sizes = {64, 128};
    c.rates = grid(0.0, 1.0, 11);
    c.observables = {ObservableId::magic_density, ObservableId::mutual_magic_half};
    c.n_traj = scaled(2000);
  } else if (name == "fig4") {
    c.sizes = {512};
    c.rates = {0.5};
    c.observables = {ObservableId::mutual_magic_profile,
                     ObservableId::entanglement_profile};
    c.n_traj = scaled(2000);
    r.fit_profile = true;
    r.dynamics = true;
  } else if (name == "fig5") {
    c.sizes = {64, 128, 256};
    c.boundary = Boundary::open;
    c.rates = grid(0.35, 0.65, 13);
    c.observables = {ObservableId::topo_magic};
    c.n_traj = scaled(4000);
    r.run_collapse = true;
  } else if (name == "fig6") {
    c.sizes = {64, 128, 256};
    c.rates = grid(0.0, 1.0, 11);
    c.scheme_kind = AngleScheme::Kind::dilute;
    c.q.kind = QSpec::Kind::two_over_l;
    c.initial_phase = PhaseValue::exact(0);
    c.mode = EngineMode::full;
    c.observables = {ObservableId::magic_density, ObservableId::mutual_magic_half};
    c.n_traj = scaled(2000);
  } else if (name == "fig7") {
    c.dimension = 2;
    c.sizes = {8, 12, 16};
    c.rates = grid(0.0, 1.0, 21);
    c.observables = {ObservableId::magic_density, ObservableId::mutual_magic_half};
    c.n_traj = scaled(2000);
  } else if (name == "fig8") {
    c.dimension = 2;
    c.sizes = {32};
    c.rates = {0.75};
    c.observables = {ObservableId::mutual_magic_profile,
                     ObservableId::entanglement_profile};
    c.n_traj = scaled(2000);
    r.fit_area = true;
  } else if (name == "fig9") {
    c.dimension = 2;
    c.sizes = {8, 12, 16};
    c.rates = grid(0.0, 1.0, 11);
    c.scheme_kind = AngleScheme::Kind::dilute;
    c.q.kind = QSpec::Kind::two_over_n;
    c.initial_phase = PhaseValue::exact(0);
    c.mode = EngineMode::full;
    c.observables = {ObservableId::magic_density, ObservableId::mutual_magic_half};
    c.n_traj = scaled(2000);
  } else {
    throw ConfigError("unknown recipe '" + name + "' (fig3..fig9)");
  }
  return r;
}

int cmd_recipe(const std::string& name, double scale, const Overrides& o) {
  if (scale <= 0) throw ConfigError("--scale must be positive");
  Recipe r = make_recipe(name, scale);
  RunConfig& cfg = r.cfg;
  cfg.out_dir = o.out_dir ? *o.out_dir : "out/" + name;
  if (o.master_seed) cfg.master_seed = *o.master_seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.n_traj) cfg.n_traj = *o.n_traj;

  fs::path out(cfg.out_dir);
  fs::create_directories(out);
  write_json(out / "config.json", cfg.resolved_json());

  // Reuse the sweep machinery (resume included) on the generated config.
  Overrides none;
  int rc = cmd_sweep((out / "config.json").string(), none);
  if (rc != 0) return rc;

  // Derived fits are best-effort: at low --scale the statistics can be too
  // thin for a stable window, which should not discard the computed cells.
  auto soft = [](const char* what, auto&& step) {
    try {
      if (step() != 0)
        std::cerr << "warning: " << what << " step failed\n";
    } catch (const std::exception& e) {
      std::cerr << "warning: " << what << " skipped: " << e.what() << "\n";
    }
  };

  uint32_t L = cfg.sizes.back();
  double p = cfg.rates[0];
  if (r.fit_profile)
    soft("profile fit", [&] {
      return cmd_fit((out / "sweep.csv").string(), "profile",
                     "mutual_magic_profile", L, p, {},
                     (out / "fit_profile.json").string());
    });
  if (r.fit_area)
    soft("area fit", [&] {
      return cmd_fit((out / "sweep.csv").string(), "area",
                     "mutual_magic_profile", L, p, {},
                     (out / "fit_area.json").string());
    });
  if (r.run_collapse)
    soft("collapse", [&] {
      return cmd_collapse((out / "sweep.csv").string(), "topo_magic", 0, 0.4,
                          0.6, 0.8, 2.2, 41, 3,
                          (out / "collapse.json").string());
    });
  if (r.dynamics) {
    RunConfig dcfg = cfg;
    dcfg.observables = {ObservableId::mutual_magic_half};
    dcfg.out_dir = (out / "dynamics").string();
    fs::create_directories(dcfg.out_dir);
    write_json(fs::path(dcfg.out_dir) / "config.json", dcfg.resolved_json());
    rc = cmd_dynamics((fs::path(dcfg.out_dir) / "config.json").string(), none, 1);
    if (rc != 0) return rc;
    soft("growth fit", [&] {
      return cmd_fit((fs::path(dcfg.out_dir) / "dynamics.csv").string(),
                     "growth", "mutual_magic_half", L, p, {},
                     (out / "fit_growth.json").string());
    });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"measurement-only circuits on rotated Bell clusters"};
  app.set_version_flag("--version", version_string);
  app.require_subcommand(1);

  std::string config_path;
  Overrides o;

  auto* run = app.add_subcommand("run", "single ensemble at one (L, p)");
  add_override_flags(run, config_path, o);

  auto* sweep = app.add_subcommand("sweep", "ensemble grid over L x p, resumable");
  add_override_flags(sweep, config_path, o);

  uint32_t stride = 1;
  auto* dynamics =
      app.add_subcommand("dynamics", "time-resolved observables at one (L, p)");
  add_override_flags(dynamics, config_path, o);
  dynamics->add_option("--stride", stride, "record every k-th step");

  std::string fit_input, fit_kind = "profile", fit_obs = "mutual_magic_profile";
  uint32_t fit_L = 0;
  double fit_p = 0.5;
  std::vector<double> fit_window;
  std::string fit_out = "fit.json";
  auto* fit = app.add_subcommand("fit", "fit profiles, growth curves or area laws");
  fit->add_option("-i,--input", fit_input, "sweep or dynamics CSV")->required();
  fit->add_option("--kind", fit_kind, "profile | growth | area");
  fit->add_option("--observable", fit_obs, "observable id to fit");
  fit->add_option("--L", fit_L, "system size of the profile");
  fit->add_option("--p", fit_p, "measurement rate of the profile");
  fit->add_option("--window", fit_window, "fit window: lo hi")->expected(2);
  fit->add_option("-o,--out", fit_out, "report path");

  std::string col_input, col_obs = "topo_magic", col_out = "collapse.json";
  uint32_t col_element = 0, col_grid = 41, col_refine = 3;
  double col_pc_lo = 0.4, col_pc_hi = 0.6, col_nu_lo = 0.8, col_nu_hi = 2.2;
  auto* col = app.add_subcommand("collapse", "finite-size scaling collapse");
  col->add_option("-i,--input", col_input, "sweep CSV")->required();
  col->add_option("--observable", col_obs, "observable id to collapse");
  col->add_option("--element", col_element, "profile element (0 for scalars)");
  col->add_option("--pc-min", col_pc_lo, "lower bound for pc");
  col->add_option("--pc-max", col_pc_hi, "upper bound for pc");
  col->add_option("--nu-min", col_nu_lo, "lower bound for nu");
  col->add_option("--nu-max", col_nu_hi, "upper bound for nu");
  col->add_option("--grid", col_grid, "search grid points per axis");
  col->add_option("--refinements", col_refine, "zoom-in passes");
  col->add_option("-o,--out", col_out, "report path");

  uint32_t val_sites = 6, val_dim = 1, val_seeds = 100, val_steps = 12;
  std::vector<double> val_rates;
  std::string val_out;
  auto* val = app.add_subcommand(
      "validate", "couple the cluster engine to the dense reference");
  val->add_option("--sites", val_sites, "site count (<= 12)");
  val->add_option("--dim", val_dim, "lattice dimension: 1 | 2");
  val->add_option("--seeds", val_seeds, "seeds per scheme and rate");
  val->add_option("--p", val_rates, "rates to test (default 0.25 0.5 0.75)");
  val->add_option("--steps", val_steps, "circuit depth per run");
  val->add_option("-o,--out", val_out, "report path (optional)");

  std::string rec_name;
  double rec_scale = 1.0;
  auto* rec = app.add_subcommand("recipe", "preset studies fig3..fig9");
  rec->add_option("name", rec_name, "fig3 | fig4 | fig5 | fig6 | fig7 | fig8 | fig9")
      ->required();
  rec->add_option("--scale", rec_scale, "trajectory count multiplier");
  rec->add_option("-o,--out", o.out_dir, "output directory");
  rec->add_option("--seed", o.master_seed, "master seed");
  rec->add_option("--n-traj", o.n_traj, "trajectory count override");
  rec->add_option("--workers", o.workers, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, o);
    if (sweep->parsed()) return cmd_sweep(config_path, o);
    if (dynamics->parsed()) return cmd_dynamics(config_path, o, stride);
    if (fit->parsed())
      return cmd_fit(fit_input, fit_kind, fit_obs, fit_L, fit_p, fit_window,
                     fit_out);
    if (col->parsed())
      return cmd_collapse(col_input, col_obs, col_element, col_pc_lo, col_pc_hi,
                          col_nu_lo, col_nu_hi, col_grid, col_refine, col_out);
    if (val->parsed())
      return cmd_validate(val_sites, val_dim, val_seeds, val_rates, val_steps,
                          val_out);
    if (rec->parsed()) return cmd_recipe(rec_name, rec_scale, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SchemeCompatError& e) {
    std::cerr << "scheme error: " << e.what() << "\n";
    return 3;
  } catch (const MissingInputError& e) {
    std::cerr << "missing input: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
