#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "rbcsim/config.hpp"
#include "rbcsim/rbcsim.hpp"

using namespace rbcsim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path = fs::temp_directory_path() /
           ("rbcsim_test_" + std::to_string(stamp) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("doubles survive the CSV round trip bit for bit") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-9, 1e-300, 0.0, 12345.678901234567}) {
    REQUIRE(parse_double(format_double(v)) == v);
  }
  REQUIRE_THROWS_AS(parse_double("12x"), ConfigError);
}

TEST_CASE("sweep CSV round trip preserves every field") {
  TempDir tmp;
  SweepDataset ds;
  ds.rows.push_back({64, 0.5, "magic_density", 0, 0.123456789012345, 0.01, 100});
  ds.rows.push_back({64, 0.5, "mutual_magic_profile", 3, 1.0 / 3.0, 2e-3, 100});
  ds.rows.push_back({128, 0.55, "magic_density", 0, 0.99, 0.0, 50});
  auto file = tmp.path / "sweep.csv";
  write_sweep_csv(file, ds.rows);
  auto back = read_sweep_csv(file);
  REQUIRE(back.rows.size() == ds.rows.size());
  for (size_t k = 0; k < ds.rows.size(); ++k) {
    REQUIRE(back.rows[k].L == ds.rows[k].L);
    REQUIRE(back.rows[k].p == ds.rows[k].p);
    REQUIRE(back.rows[k].observable == ds.rows[k].observable);
    REQUIRE(back.rows[k].element == ds.rows[k].element);
    REQUIRE(back.rows[k].mean == ds.rows[k].mean);
    REQUIRE(back.rows[k].stderr_ == ds.rows[k].stderr_);
    REQUIRE(back.rows[k].n_traj == ds.rows[k].n_traj);
  }
}

TEST_CASE("dynamics CSV round trip") {
  TempDir tmp;
  std::vector<DynamicsRow> rows;
  rows.push_back({1, "mutual_magic_half", 0, 0.25, 0.003, 400});
  rows.push_back({2, "mutual_magic_half", 0, 0.5, 0.004, 400});
  auto file = tmp.path / "dyn.csv";
  write_dynamics_csv(file, rows);
  auto back = read_dynamics_csv(file);
  REQUIRE(back.size() == 2);
  REQUIRE(back[1].t == 2);
  REQUIRE(back[1].mean == 0.5);
}

TEST_CASE("missing input files raise the dedicated error") {
  REQUIRE_THROWS_AS(read_sweep_csv("/nonexistent/zzz.csv"), MissingInputError);
  REQUIRE_THROWS_AS(read_json("/nonexistent/zzz.json"), MissingInputError);
}

TEST_CASE("malformed tables are rejected") {
  TempDir tmp;
  auto file = tmp.path / "bad.csv";
  {
    std::ofstream out(file);
    out << "L,p,observable,element,mean,stderr,n_traj\n";
    out << "64,0.5,magic_density,0,1.0\n";  // short row
  }
  REQUIRE_THROWS(read_sweep_csv(file));
  {
    std::ofstream out(file);
    out << "wrong,header\n";
  }
  REQUIRE_THROWS(read_sweep_csv(file));
}

TEST_CASE("minimal config resolves the documented defaults") {
  auto cfg = parse_config(nlohmann::json{{"L", 64}, {"p", 0.5}, {"n_traj", 10}});
  REQUIRE(cfg.sizes == std::vector<uint32_t>{64});
  REQUIRE(cfg.rates == std::vector<double>{0.5});
  REQUIRE(cfg.n_traj == 10);
  REQUIRE(cfg.dimension == 1);
  REQUIRE(cfg.boundary == Boundary::periodic);
  REQUIRE(cfg.scheme_kind == AngleScheme::Kind::fixed);
  REQUIRE(cfg.theta.exact_units() == 1);
  REQUIRE(cfg.t_max_for(64) == 128);
  REQUIRE(cfg.mode == EngineMode::parity);
  REQUIRE(cfg.measure == MagicMeasure::t_unit);
  REQUIRE(cfg.observables ==
          std::vector<ObservableId>{ObservableId::magic_density});
  REQUIRE(cfg.initial_phase.exact_units() == 1);
  REQUIRE(cfg.master_seed == 1);

  // 2D default depth is L, not 2L
  auto cfg2 = parse_config(
      nlohmann::json{{"L", 8}, {"p", 0.5}, {"n_traj", 10}, {"dimension", 2}});
  REQUIRE(cfg2.t_max_for(8) == 8);
}

TEST_CASE("unknown keys and type errors are schema violations") {
  REQUIRE_THROWS_AS(parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 10},
                                  {"tmax", 3}}),
                    ConfigError);
  REQUIRE_THROWS_AS(parse_config({{"p", 0.5}, {"n_traj", 10}}), ConfigError);
  REQUIRE_THROWS_AS(parse_config({{"L", 64}, {"p", 1.5}, {"n_traj", 10}}),
                    ConfigError);
  REQUIRE_THROWS_AS(parse_config({{"L", 1}, {"p", 0.5}, {"n_traj", 10}}),
                    ConfigError);
  REQUIRE_THROWS_AS(parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 0}}),
                    ConfigError);
  REQUIRE_THROWS_AS(parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 10},
                                  {"boundary", "moebius"}}),
                    ConfigError);
  REQUIRE_THROWS_AS(parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 10},
                                  {"observables", nlohmann::json::array()}}),
                    ConfigError);
  REQUIRE_THROWS_AS(parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 10},
                                  {"theta_units_pi4", 1},
                                  {"theta_radians", 0.5}}),
                    ConfigError);
}

TEST_CASE("engine and measure compatibility rules") {
  // explicit parity + random angles: hard error
  REQUIRE_THROWS_AS(parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 10},
                                  {"scheme", "random_uniform"},
                                  {"mode", "parity"}}),
                    SchemeCompatError);
  // t_unit + random angles: undefined
  REQUIRE_THROWS_AS(parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 10},
                                  {"scheme", "random_uniform"},
                                  {"measure", "t_unit"}}),
                    SchemeCompatError);
  // auto mode falls back to the full engine when parity cannot serve
  auto cfg = parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 10},
                           {"scheme", "random_uniform"}});
  REQUIRE(cfg.mode == EngineMode::full);
  REQUIRE(cfg.measure == MagicMeasure::nullity);
  // even theta keeps the full engine as well
  auto cfg2 = parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 10},
                            {"theta_units_pi4", 2}});
  REQUIRE(cfg2.mode == EngineMode::full);
  // dilute at pi/4 keeps the t-unit measure but not the parity engine
  auto cfg3 = parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 10},
                            {"scheme", "dilute"}, {"q", 0.5}});
  REQUIRE(cfg3.mode == EngineMode::full);
  REQUIRE(cfg3.measure == MagicMeasure::t_unit);
}

TEST_CASE("topological magic demands a chain with L divisible by 4") {
  REQUIRE_THROWS_AS(
      parse_config({{"L", 6}, {"p", 0.5}, {"n_traj", 10},
                    {"observables", {"topo_magic"}}}),
      ConfigError);
  REQUIRE_THROWS_AS(
      parse_config({{"L", 8}, {"p", 0.5}, {"n_traj", 10}, {"dimension", 2},
                    {"observables", {"topo_magic"}}}),
      ConfigError);
  REQUIRE_NOTHROW(parse_config({{"L", 8}, {"p", 0.5}, {"n_traj", 10},
                                {"observables", {"topo_magic"}}}));
}

TEST_CASE("q accepts a number or the two documented formulas") {
  auto a = parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 10},
                         {"scheme", "dilute"}, {"q", "2/L"}});
  auto lat = build_lattice({1, 64, Boundary::periodic});
  REQUIRE(a.scheme_for(lat).q == 2.0 / 64.0);
  auto b = parse_config({{"L", 4}, {"p", 0.5}, {"n_traj", 10},
                         {"dimension", 2}, {"scheme", "dilute"}, {"q", "2/N"}});
  auto lat2 = build_lattice({2, 4, Boundary::periodic});
  REQUIRE(b.scheme_for(lat2).q == 2.0 / 16.0);
  REQUIRE_THROWS_AS(parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 10},
                                  {"scheme", "dilute"}, {"q", "3/L"}}),
                    ConfigError);
  REQUIRE_THROWS_AS(parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 10},
                                  {"q", 0.5}}),
                    ConfigError);
}

TEST_CASE("resolved config echo reloads to itself") {
  nlohmann::json j{{"L", {64, 128}},
                   {"p", {0.2, 0.5, 0.8}},
                   {"n_traj", 100},
                   {"scheme", "dilute"},
                   {"q", "2/L"},
                   {"boundary", "open"},
                   {"master_seed", 77},
                   {"t_window", {100, 128}},
                   {"t_max", 128},
                   {"workers", 2},
                   {"experiment", "demo"}};
  auto cfg = parse_config(j);
  auto echo = cfg.resolved_json();
  auto cfg2 = parse_config(echo);
  REQUIRE(cfg2.resolved_json() == echo);
}

TEST_CASE("config digest tracks physics, not plumbing") {
  auto base = parse_config({{"L", 64}, {"p", 0.5}, {"n_traj", 10}});
  auto cosmetic = base;
  cosmetic.out_dir = "elsewhere";
  cosmetic.workers = 7;
  cosmetic.experiment = "renamed";
  REQUIRE(config_digest(base) == config_digest(cosmetic));
  auto physics = base;
  physics.n_traj = 11;
  REQUIRE(config_digest(base) != config_digest(physics));
  auto seeded = base;
  seeded.master_seed = 2;
  REQUIRE(config_digest(base) != config_digest(seeded));
}

TEST_CASE("trajectory sinks write lines in index order") {
  TempDir tmp;
  JsonlRecordSink sink(3);
  TrajectoryRecord rec;
  rec.seed = 5;
  rec.values = {1.0, 2.0};
  sink.take(2, rec);
  rec.seed = 3;
  sink.take(0, rec);
  rec.seed = 4;
  sink.take(1, rec);
  auto file = tmp.path / "t.jsonl";
  sink.write(file);
  std::ifstream in(file);
  std::string line;
  std::vector<uint64_t> seeds;
  while (std::getline(in, line))
    seeds.push_back(nlohmann::json::parse(line)["seed"].get<uint64_t>());
  REQUIRE(seeds == std::vector<uint64_t>{3, 4, 5});
}

TEST_CASE("manifest records version, command and the resolved config") {
  TempDir tmp;
  write_manifest(tmp.path, nlohmann::json{{"L", 64}}, "sweep");
  auto j = read_json(tmp.path / "manifest.json");
  REQUIRE(j["version"].get<std::string>() == version_string);
  REQUIRE(j["command"].get<std::string>() == "sweep");
  REQUIRE(j["config"]["L"].get<int>() == 64);
  REQUIRE(j.contains("created_utc"));
}

TEST_CASE("atomic JSON writes leave no temp file behind") {
  TempDir tmp;
  auto file = tmp.path / "cell.json";
  write_json_atomic(file, nlohmann::json{{"k", 1}});
  REQUIRE(fs::exists(file));
  REQUIRE_FALSE(fs::exists(tmp.path / "cell.json.tmp"));
  REQUIRE(read_json(file)["k"].get<int>() == 1);
}

TEST_CASE("debug dump exposes labels, bits and phases") {
  ClusterState st(3, PhaseValue::exact(1));
  st.measure_zz(0, 1, OutcomeSource::forced(1));
  auto j = debug_dump(st);
  REQUIRE(j["n_sites"].get<int>() == 3);
  REQUIRE(j["n_clusters"].get<int>() == 2);
  REQUIRE(j["site_label"].size() == 3);
  bool found_pair = false;
  for (const auto& [key, c] : j["clusters"].items()) {
    if (c["size"].get<int>() == 2) {
      found_pair = true;
      REQUIRE(c["members"].size() == 2);
      REQUIRE(c["phase"]["mode"].get<std::string>() == "exact");
      REQUIRE(c["phase"]["value"].get<int>() == 2);
    }
  }
  REQUIRE(found_pair);
}
