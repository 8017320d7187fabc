#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "rbcsim/circuit.hpp"
#include "rbcsim/ensemble.hpp"

using namespace rbcsim;

TEST_CASE("1D lattices enumerate nearest-neighbour edges") {
  auto pbc = build_lattice({1, 4, Boundary::periodic});
  REQUIRE(pbc.n_sites == 4);
  REQUIRE(pbc.edges.size() == 4);
  auto obc = build_lattice({1, 4, Boundary::open});
  REQUIRE(obc.edges.size() == 3);
  REQUIRE(obc.profile_cuts() == 3);
  REQUIRE(obc.half_region() == std::vector<uint32_t>{0, 1});
}

TEST_CASE("2D lattices: counts, rows, blocks") {
  auto pbc = build_lattice({2, 3, Boundary::periodic});
  REQUIRE(pbc.n_sites == 9);
  REQUIRE(pbc.edges.size() == 18);
  auto obc = build_lattice({2, 3, Boundary::open});
  REQUIRE(obc.edges.size() == 12);

  auto l4 = build_lattice({2, 4, Boundary::periodic});
  REQUIRE(l4.half_region().size() == 8);  // top two rows
  REQUIRE(l4.profile_cuts() == 2);
  auto block = l4.block_region(2);  // 2x2 corner
  std::set<uint32_t> expect{0, 1, 4, 5};
  REQUIRE(std::set<uint32_t>(block.begin(), block.end()) == expect);
  // profile value is max(row, col): site 5 = (1,1) -> 1
  REQUIRE(l4.profile_value(5) == 1);
  REQUIRE(l4.profile_value(2) == 2);
}

TEST_CASE("tripartition splits a chain into L/4, L/2, L/4") {
  auto lat = build_lattice({1, 8, Boundary::open});
  auto [a, b, c] = lat.tripartition();
  REQUIRE(a == std::vector<uint32_t>{0, 1});
  REQUIRE(b == std::vector<uint32_t>{2, 3, 4, 5});
  REQUIRE(c == std::vector<uint32_t>{6, 7});
  auto bad = build_lattice({1, 6, Boundary::open});
  REQUIRE_THROWS_AS(bad.tripartition(), std::invalid_argument);
}

TEST_CASE("evaluation plans validate and label their slots") {
  REQUIRE_THROWS(EvalPlan{{}, false}.validate());
  REQUIRE_THROWS(EvalPlan{{3, 2}, false}.validate());
  auto every = EvalPlan::every_step(6, 2);
  REQUIRE(every.times == std::vector<uint32_t>{2, 4, 6});
  REQUIRE(every.blocks() == 3);
  auto win = EvalPlan::window(3, 5);
  REQUIRE(win.average);
  REQUIRE(win.blocks() == 1);

  CircuitParams params;
  params.lattice = build_lattice({1, 8, Boundary::periodic});
  params.observables = {ObservableId::magic_density,
                        ObservableId::entanglement_profile};
  Evaluator ev(params);
  REQUIRE(ev.slots_per_eval() == 1 + 7);
  auto labels = ev.labels(EvalPlan::final_at(4));
  REQUIRE(labels.size() == 8);
  REQUIRE(labels[0].obs == ObservableId::magic_density);
  REQUIRE(labels[0].element == 0);
  REQUIRE(labels[1].element == 1);
  REQUIRE(labels.back().element == 7);
  REQUIRE(labels[0].time == 4);
}

TEST_CASE("observable names round-trip") {
  for (int k = 0; k <= static_cast<int>(ObservableId::shannon_mutual); ++k) {
    auto id = static_cast<ObservableId>(k);
    REQUIRE(observable_from_name(observable_name(id)) == id);
  }
  REQUIRE_THROWS(observable_from_name("nope"));
}

TEST_CASE("pure bond measurements glue an even ring into one stabilizer cluster") {
  CircuitParams params;
  params.lattice = build_lattice({1, 4, Boundary::periodic});
  params.p = 0.0;
  params.plan = EvalPlan::final_at(1);
  params.observables = {ObservableId::magic_density, ObservableId::mutual_magic_half,
                        ObservableId::entanglement_half, ObservableId::participation};
  auto rec = run_trajectory<ClusterState>(params, 42);
  REQUIRE(rec.values.size() == 4);
  REQUIRE(rec.values[0] == 0.0);  // even global cluster carries no magic
  REQUIRE(rec.values[1] == 0.0);
  REQUIRE(rec.values[2] == 1.0);  // single straddling cluster
  REQUIRE(rec.values[3] == 1.0);  // one cluster
}

TEST_CASE("pure site measurements leave a product of T-like singletons") {
  CircuitParams params;
  params.lattice = build_lattice({1, 6, Boundary::periodic});
  params.p = 1.0;
  params.plan = EvalPlan::final_at(3);
  params.observables = {ObservableId::magic_density, ObservableId::participation,
                        ObservableId::entanglement_half};
  auto rec = run_trajectory<ClusterState>(params, 9001);
  REQUIRE(rec.values[0] == 1.0);  // one T unit per site
  REQUIRE(rec.values[1] == 6.0);
  REQUIRE(rec.values[2] == 0.0);
}

TEST_CASE("trajectories are reproducible and seed-sensitive") {
  CircuitParams params;
  params.lattice = build_lattice({1, 16, Boundary::periodic});
  params.p = 0.5;
  params.plan = EvalPlan::every_step(32);
  params.observables = {ObservableId::magic_density, ObservableId::mutual_magic_half};
  auto a = run_trajectory<ClusterState>(params, 5);
  auto b = run_trajectory<ClusterState>(params, 5);
  auto c = run_trajectory<ClusterState>(params, 6);
  REQUIRE(a.values == b.values);
  REQUIRE(a.values != c.values);
}

TEST_CASE("window averaging equals the mean over the recorded steps") {
  CircuitParams params;
  params.lattice = build_lattice({1, 12, Boundary::periodic});
  params.p = 0.4;
  params.observables = {ObservableId::magic_density, ObservableId::entanglement_half};
  params.plan = EvalPlan::every_step(8);
  auto full = run_trajectory<ClusterState>(params, 77);

  params.plan = EvalPlan::window(5, 8);
  auto win = run_trajectory<ClusterState>(params, 77);
  REQUIRE(win.values.size() == 2);
  for (size_t k = 0; k < 2; ++k) {
    double mean = 0;
    for (uint32_t t = 5; t <= 8; ++t) mean += full.values[(t - 1) * 2 + k];
    mean /= 4.0;
    REQUIRE(std::abs(win.values[k] - mean) < 1e-12);
  }
}

TEST_CASE("fixed schemes share structure evolution regardless of the angle") {
  // fixed schemes consume identical randomness, and neither merges nor
  // detaches depend on the angle, so the partitions must coincide
  CircuitParams a;
  a.lattice = build_lattice({1, 20, Boundary::periodic});
  a.p = 0.5;
  a.plan = EvalPlan::final_at(40);
  a.observables = {ObservableId::participation, ObservableId::entanglement_half,
                   ObservableId::shannon_mutual};
  CircuitParams b = a;
  b.scheme = AngleScheme::fixed(PhaseValue::exact(0));
  b.initial_phase = PhaseValue::exact(0);
  b.measure = MagicMeasure::nullity;
  for (uint64_t seed : {1ULL, 17ULL, 400ULL}) {
    auto ra = run_trajectory<ClusterState>(a, seed);
    auto rb = run_trajectory<ClusterState>(b, seed);
    REQUIRE(ra.values == rb.values);
  }
}

TEST_CASE("ensemble aggregation is independent of the worker count") {
  CircuitParams params;
  params.lattice = build_lattice({1, 10, Boundary::periodic});
  params.p = 0.5;
  params.plan = EvalPlan::final_at(20);
  params.observables = {ObservableId::magic_density, ObservableId::mutual_magic_half};
  auto r1 = run_ensemble<ClusterState>(params, 100, 424242, 1);
  auto r4 = run_ensemble<ClusterState>(params, 100, 424242, 4);
  REQUIRE(r1.mean == r4.mean);
  REQUIRE(r1.stderr_ == r4.stderr_);
  REQUIRE(r1.n_traj == 100);
  REQUIRE(r1.labels.size() == r1.mean.size());
}

TEST_CASE("degenerate ensembles report zero spread") {
  CircuitParams params;
  params.lattice = build_lattice({1, 4, Boundary::periodic});
  params.p = 1.0;
  params.plan = EvalPlan::final_at(2);
  params.observables = {ObservableId::magic_density};
  auto r = run_ensemble<ClusterState>(params, 50, 3, 2);
  REQUIRE(r.mean[0] == 1.0);
  REQUIRE(r.stderr_[0] == 0.0);
}

TEST_CASE("parity dispatch rejects incompatible schemes") {
  CircuitParams params;
  params.lattice = build_lattice({1, 8, Boundary::periodic});
  params.scheme = AngleScheme::random_uniform();
  params.measure = MagicMeasure::nullity;
  params.plan = EvalPlan::final_at(2);
  REQUIRE_THROWS(run_trajectory(params, EngineMode::parity, 1));
  REQUIRE_NOTHROW(run_trajectory(params, EngineMode::full, 1));
}
