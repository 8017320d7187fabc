#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "rbcsim/circuit.hpp"
#include "rbcsim/ensemble.hpp"

using namespace rbcsim;

TEST_CASE("size tracking under detach and merge") {
  ParityState st(4);
  REQUIRE(st.n_clusters() == 4);
  st.apply_x(0);  // singleton: no-op
  REQUIRE(st.n_clusters() == 4);

  st.apply_zz(0, 1);
  st.apply_zz(1, 2);
  REQUIRE(st.n_clusters() == 2);
  REQUIRE(st.cluster_size(st.label_of(0)) == 3);
  st.apply_zz(0, 2);  // same cluster: no-op
  REQUIRE(st.n_clusters() == 2);

  st.apply_x(1);
  REQUIRE(st.n_clusters() == 3);
  REQUIRE(st.cluster_size(st.label_of(0)) == 2);
  REQUIRE(st.cluster_size(st.label_of(1)) == 1);
  REQUIRE(st.label_of(0) == st.label_of(2));
  REQUIRE(st.label_of(0) != st.label_of(1));

  // the detached site can rejoin its old partners
  st.apply_zz(1, 2);
  REQUIRE(st.n_clusters() == 2);
  REQUIRE(st.cluster_size(st.label_of(1)) == 3);
}

TEST_CASE("census sizes sum to the site count and parity flags match sizes") {
  ParityState st(10);
  st.apply_zz(0, 1);
  st.apply_zz(2, 3);
  st.apply_zz(3, 4);
  st.apply_x(3);
  auto cs = st.census();
  uint32_t total = 0;
  for (const auto& e : cs.clusters) {
    total += e.size;
    REQUIRE(e.odd == (e.size % 2 == 1));
    REQUIRE_FALSE(e.has_phase);
  }
  REQUIRE(total == 10);
  REQUIRE(cs.clusters.size() == st.n_clusters());
}

TEST_CASE("full and parity engines agree trajectory-by-trajectory at pi/4") {
  CircuitParams params;
  params.lattice = build_lattice({1, 24, Boundary::periodic});
  params.plan = EvalPlan::every_step(48, 6);
  params.observables = {
      ObservableId::magic_density,     ObservableId::mutual_magic_half,
      ObservableId::mutual_magic_profile, ObservableId::topo_magic,
      ObservableId::entanglement_half, ObservableId::entanglement_profile,
      ObservableId::participation,     ObservableId::shannon_mutual};
  for (double p : {0.3, 0.5, 0.7}) {
    params.p = p;
    for (uint64_t seed : {2ULL, 3ULL, 5ULL, 8ULL, 13ULL}) {
      auto full = run_trajectory(params, EngineMode::full, seed);
      auto par = run_trajectory(params, EngineMode::parity, seed);
      REQUIRE(full.values == par.values);
    }
  }
}

TEST_CASE("full and parity partitions coincide site-by-site") {
  CircuitParams params;
  params.lattice = build_lattice({2, 4, Boundary::periodic});
  params.p = 0.5;
  params.plan = EvalPlan::final_at(1);
  params.observables = {ObservableId::participation};

  ClusterState full(16, PhaseValue::exact(1));
  ParityState par(16);
  Xoshiro256pp rng_a(31), rng_b(31);
  StepScratch sa, sb;
  for (int t = 0; t < 12; ++t) {
    step(full, params, rng_a, sa);
    step(par, params, rng_b, sb);
    auto ca = full.census();
    auto cb = par.census();
    REQUIRE(ca.clusters.size() == cb.clusters.size());
    for (uint32_t i = 0; i < 16; ++i)
      for (uint32_t j = i + 1; j < 16; ++j)
        REQUIRE((ca.site_cluster[i] == ca.site_cluster[j]) ==
                (cb.site_cluster[i] == cb.site_cluster[j]));
    for (uint32_t i = 0; i < 16; ++i) {
      const auto& ea = ca.clusters[ca.site_cluster[i]];
      const auto& eb = cb.clusters[cb.site_cluster[i]];
      REQUIRE(ea.size == eb.size);
      REQUIRE(ea.odd == eb.odd);
      // parity law: odd size iff odd phase units under the pi/4 protocol
      REQUIRE(ea.phase.exact_units() % 2 == (ea.odd ? 1 : 0));
    }
  }
}

TEST_CASE("parity ensembles are worker-invariant too") {
  CircuitParams params;
  params.lattice = build_lattice({1, 64, Boundary::periodic});
  params.p = 0.45;
  params.plan = EvalPlan::final_at(128);
  params.observables = {ObservableId::magic_density, ObservableId::mutual_magic_half};
  auto r1 = run_ensemble(params, EngineMode::parity, 200, 99, 1);
  auto r3 = run_ensemble(params, EngineMode::parity, 200, 99, 3);
  REQUIRE(r1.mean == r3.mean);
  REQUIRE(r1.stderr_ == r3.stderr_);
}
