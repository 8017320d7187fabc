#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rbcsim/cluster_state.hpp"
#include "rbcsim/observables.hpp"

using namespace rbcsim;

namespace {

// 8-site chain: {0,1} pi/4, {2} 0, {3,4,5} 3pi/4, {6} pi/4, {7} pi/2.
// T-unit magic per cluster: 1, 0, 1, 1, 0.
ClusterState example_state() {
  StateSnapshot s;
  s.n_sites = 8;
  s.clusters.push_back({{0, 1}, {0, 0}, PhaseValue::exact(1)});
  s.clusters.push_back({{2}, {0}, PhaseValue::exact(0)});
  s.clusters.push_back({{3, 4, 5}, {0, 1, 0}, PhaseValue::exact(3)});
  s.clusters.push_back({{6}, {0}, PhaseValue::exact(1)});
  s.clusters.push_back({{7}, {1}, PhaseValue::exact(2)});
  return ClusterState::from_snapshot(s);
}

}  // namespace

TEST_CASE("single-qubit magic, all three measures") {
  SECTION("nullity: 0 on stabilizer phases, else 1") {
    REQUIRE(single_qubit_magic(PhaseValue::exact(0), MagicMeasure::nullity) == 0.0);
    REQUIRE(single_qubit_magic(PhaseValue::exact(2), MagicMeasure::nullity) == 0.0);
    REQUIRE(single_qubit_magic(PhaseValue::exact(1), MagicMeasure::nullity) == 1.0);
    REQUIRE(single_qubit_magic(PhaseValue::radians(0.3), MagicMeasure::nullity) ==
            1.0);
  }
  SECTION("t_unit: odd quarter-turns count one unit") {
    for (int k : {1, 3, 5, 7})
      REQUIRE(single_qubit_magic(PhaseValue::exact(k), MagicMeasure::t_unit) == 1.0);
    for (int k : {0, 2, 4, 6})
      REQUIRE(single_qubit_magic(PhaseValue::exact(k), MagicMeasure::t_unit) == 0.0);
    // real phases must snap to the grid
    REQUIRE(single_qubit_magic(PhaseValue::radians(pi / 4), MagicMeasure::t_unit) ==
            1.0);
    REQUIRE_THROWS(single_qubit_magic(PhaseValue::radians(0.3),
                                      MagicMeasure::t_unit));
  }
  SECTION("sre2 closed form and the T-state constant") {
    REQUIRE(single_qubit_magic(PhaseValue::exact(0),
                               MagicMeasure::stabilizer_renyi2) == 0.0);
    double t = single_qubit_magic(PhaseValue::exact(1),
                                  MagicMeasure::stabilizer_renyi2);
    REQUIRE(std::abs(t - std::log2(4.0 / 3.0)) < 1e-15);
    REQUIRE(t == t_state_sre2);
    double phi = 0.9;
    double c4 = std::pow(std::cos(phi), 4), s4 = std::pow(std::sin(phi), 4);
    REQUIRE(std::abs(single_qubit_magic(PhaseValue::radians(phi),
                                        MagicMeasure::stabilizer_renyi2) -
                     (-std::log2((1 + c4 + s4) / 2))) < 1e-12);
  }
  SECTION("invariance under phi -> -phi and phi -> phi + pi/2") {
    for (auto m : {MagicMeasure::nullity, MagicMeasure::stabilizer_renyi2}) {
      for (double phi : {0.3, 1.1, 2.9}) {
        double base = single_qubit_magic(PhaseValue::radians(phi), m);
        REQUIRE(std::abs(single_qubit_magic(PhaseValue::radians(-phi), m) - base) <
                1e-12);
        REQUIRE(std::abs(single_qubit_magic(PhaseValue::radians(phi + pi / 2), m) -
                         base) < 1e-12);
      }
    }
    for (int k = 0; k < 8; ++k) {
      double base = single_qubit_magic(PhaseValue::exact(k), MagicMeasure::t_unit);
      REQUIRE(single_qubit_magic(PhaseValue::exact(-k), MagicMeasure::t_unit) ==
              base);
      REQUIRE(single_qubit_magic(PhaseValue::exact(k + 2), MagicMeasure::t_unit) ==
              base);
    }
  }
}

TEST_CASE("measure_t_value normalizes curves to T units") {
  REQUIRE(measure_t_value(MagicMeasure::t_unit) == 1.0);
  REQUIRE(measure_t_value(MagicMeasure::nullity) == 1.0);
  REQUIRE(measure_t_value(MagicMeasure::stabilizer_renyi2) == t_state_sre2);
}

TEST_CASE("census observables on a hand-built partition") {
  auto st = example_state();
  auto cs = st.census();
  Region a = {0, 1, 2, 3};
  Region ac = {4, 5, 6, 7};

  REQUIRE(full_magic(cs, MagicMeasure::t_unit) == 3.0);
  REQUIRE(subsystem_magic(cs, a, MagicMeasure::t_unit) == 1.0);
  REQUIRE(subsystem_magic(cs, ac, MagicMeasure::t_unit) == 1.0);
  REQUIRE(mutual_magic(cs, a, MagicMeasure::t_unit) == 1.0);
  REQUIRE(entanglement_entropy(cs, a) == 1.0);
  REQUIRE(participation_entropy(cs) == 5.0);
  REQUIRE(participation_entropy(cs, a) == 3.0);
  REQUIRE(shannon_mutual_information(cs, a) == entanglement_entropy(cs, a));

  // decomposition: mutual = full - inside(A) - inside(complement)
  double mut = full_magic(cs, MagicMeasure::t_unit) -
               subsystem_magic(cs, a, MagicMeasure::t_unit) -
               subsystem_magic(cs, ac, MagicMeasure::t_unit);
  REQUIRE(mutual_magic(cs, a, MagicMeasure::t_unit) == mut);
}

TEST_CASE("mutual magic never exceeds entanglement entropy in T units") {
  auto st = example_state();
  auto cs = st.census();
  for (uint32_t cut = 1; cut < 8; ++cut) {
    Region r;
    for (uint32_t s = 0; s < cut; ++s) r.push_back(s);
    REQUIRE(mutual_magic(cs, r, MagicMeasure::t_unit) <=
            entanglement_entropy(cs, r));
  }
}

TEST_CASE("topological combination isolates clusters bridging A and C") {
  StateSnapshot s;
  s.n_sites = 8;
  s.clusters.push_back({{1, 6}, {0, 0}, PhaseValue::exact(1)});
  s.clusters.push_back({{0}, {0}, PhaseValue::exact(0)});
  s.clusters.push_back({{2, 3}, {0, 0}, PhaseValue::exact(1)});
  s.clusters.push_back({{4, 5}, {0, 1}, PhaseValue::exact(2)});
  s.clusters.push_back({{7}, {0}, PhaseValue::exact(2)});
  auto cs = ClusterState::from_snapshot(s).census();

  Region a = {0, 1}, b = {2, 3, 4, 5}, c = {6, 7};
  auto topo = topological_magic(cs, a, b, c, MagicMeasure::t_unit);
  REQUIRE(topo.value == 1.0);
  REQUIRE(topo.touching_ac_not_b == 1.0);
  REQUIRE(topo.touching_abc == 0.0);
  // the subsystem combination equals the structural tally
  REQUIRE(topo.value == topo.touching_abc + topo.touching_ac_not_b);

  Region bad = {0, 1, 2};
  REQUIRE_THROWS_AS(topological_magic(cs, bad, b, c, MagicMeasure::t_unit),
                    std::invalid_argument);
}

TEST_CASE("profiles via the difference array match per-cut evaluation") {
  auto st = example_state();
  auto cs = st.census();
  const uint32_t n_cuts = 7;
  auto ee = entanglement_profile(cs, n_cuts);
  auto mm = mutual_magic_profile(cs, n_cuts, MagicMeasure::t_unit);
  REQUIRE(ee.size() == n_cuts);
  REQUIRE(mm.size() == n_cuts);
  for (uint32_t cut = 1; cut <= n_cuts; ++cut) {
    Region r;
    for (uint32_t s = 0; s < cut; ++s) r.push_back(s);
    REQUIRE(ee[cut - 1] == entanglement_entropy(cs, r));
    REQUIRE(mm[cut - 1] == mutual_magic(cs, r, MagicMeasure::t_unit));
  }
  // frozen values for this layout
  REQUIRE(ee == std::vector<double>{1, 0, 0, 1, 1, 0, 0});
  REQUIRE(mm == std::vector<double>{1, 0, 0, 1, 1, 0, 0});
}

TEST_CASE("phase-free census entries fall back to the parity rule") {
  Census::Entry odd{3, true, false, PhaseValue::exact(0), 0, 2};
  Census::Entry even{2, false, false, PhaseValue::exact(0), 0, 1};
  REQUIRE(detail::entry_magic(odd, MagicMeasure::t_unit) == 1.0);
  REQUIRE(detail::entry_magic(odd, MagicMeasure::nullity) == 1.0);
  REQUIRE(detail::entry_magic(odd, MagicMeasure::stabilizer_renyi2) ==
          t_state_sre2);
  REQUIRE(detail::entry_magic(even, MagicMeasure::t_unit) == 0.0);
  REQUIRE(detail::entry_magic(even, MagicMeasure::stabilizer_renyi2) == 0.0);
}
