#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rbcsim/circuit.hpp"
#include "rbcsim/cluster_state.hpp"
#include "rbcsim/dense.hpp"
#include "rbcsim/lattice.hpp"
#include "rbcsim/observables.hpp"
#include "rbcsim/scheme.hpp"

namespace rbcsim {

struct CoupledTolerances {
  double probability = 1e-12;  // Born distribution agreement per event
  double fidelity = 1e-10;     // 1 - |<dense|rebuilt>| per step
  double observable = 1e-9;    // entropies and magic per step
};

struct CoupledConfig {
  Lattice lattice;  // n_sites <= 12
  double p = 0.5;
  AngleScheme scheme = AngleScheme::fixed(PhaseValue::exact(1));
  PhaseValue initial_phase = PhaseValue::exact(1);
  uint32_t steps = 12;
  CoupledTolerances tol;
};

struct CoupledEvent {
  uint32_t step;
  char kind;  // 'z' or 'x'
  uint32_t i, j;
  double theta;
  double p_cluster, p_dense;
  int lambda;
};

struct CoupledResult {
  bool passed = true;
  uint64_t seed = 0;
  uint32_t n_events = 0;
  double max_probability_deviation = 0.0;
  double min_fidelity = 1.0;
  double max_observable_deviation = 0.0;
  std::string failure;
  uint32_t failure_step = 0;
  std::vector<CoupledEvent> events;
  // cluster-engine state after the last completed step; lets callers verify
  // that coupled and production trajectories consume the same stream
  StateSnapshot final_state;

  nlohmann::json to_json(bool include_events = false) const {
    nlohmann::json j;
    j["passed"] = passed;
    j["seed"] = seed;
    j["n_events"] = n_events;
    j["max_probability_deviation"] = max_probability_deviation;
    j["min_fidelity"] = min_fidelity;
    j["max_observable_deviation"] = max_observable_deviation;
    if (!passed) {
      j["failure"] = failure;
      j["failure_step"] = failure_step;
    }
    if (!passed || include_events) {
      auto& ev = j["events"] = nlohmann::json::array();
      for (const auto& e : events) {
        ev.push_back({{"step", e.step},
                      {"kind", std::string(1, e.kind)},
                      {"sites", {e.i, e.j}},
                      {"theta", e.theta},
                      {"p_plus_cluster", e.p_cluster},
                      {"p_plus_dense", e.p_dense},
                      {"lambda", e.lambda}});
      }
    }
    return j;
  }
};

// Runs the cluster engine and the dense oracle through one trajectory in
// lockstep: Born distributions are compared per event, the realized outcome
// (drawn once through the cluster distribution) is forced into the oracle,
// and after every step the rebuilt dense state and all comparable
// observables must agree.
inline CoupledResult coupled_run(const CoupledConfig& cfg, uint64_t seed) {
  const Lattice& lat = cfg.lattice;
  const uint32_t n = lat.n_sites;
  if (n > DenseState::max_sites)
    throw std::invalid_argument("coupled run limited to 12 sites");

  CoupledResult res;
  res.seed = seed;
  ClusterState cluster(n, cfg.initial_phase);
  DenseState dense = DenseState::from_snapshot(cluster.snapshot());
  Xoshiro256pp rng(seed);

  std::vector<Region> cuts;
  for (uint32_t l = 1; l < n; ++l) cuts.push_back(lat.block_region(l));
  // 2D block regions can repeat or skip sizes; fall back to site prefixes.
  if (lat.spec.dimension == 2) {
    cuts.clear();
    for (uint32_t l = 1; l < n; ++l) {
      Region r(l);
      for (uint32_t s = 0; s < l; ++s) r[s] = s;
      cuts.push_back(r);
    }
  }

  auto fail = [&](uint32_t step, const std::string& what) {
    res.passed = false;
    res.failure = what;
    res.failure_step = step;
  };

  std::vector<uint8_t> edge_on(lat.edges.size()), site_on(n);
  std::vector<PhaseValue> angles;

  for (uint32_t t = 1; t <= cfg.steps && res.passed; ++t) {
    for (size_t e = 0; e < lat.edges.size(); ++e)
      edge_on[e] = rng.uniform() < 1.0 - cfg.p ? 1 : 0;
    for (size_t e = 0; e < lat.edges.size() && res.passed; ++e) {
      if (!edge_on[e]) continue;
      auto [i, j] = lat.edges[e];
      double pc = cluster.outcome_distribution_zz(i, j);
      double pd = dense.outcome_distribution_zz(i, j);
      double dev = std::abs(pc - pd);
      res.max_probability_deviation =
          std::max(res.max_probability_deviation, dev);
      double u = rng.uniform();
      Outcome out = cluster.measure_zz(i, j, OutcomeSource::uniform(u));
      dense.measure_zz(i, j, OutcomeSource::forced(out.lambda));
      res.events.push_back({t, 'z', i, j, 0.0, pc, pd, out.lambda});
      ++res.n_events;
      if (dev > cfg.tol.probability) fail(t, "zz Born distribution mismatch");
    }
    if (!res.passed) break;

    for (uint32_t s = 0; s < n; ++s)
      site_on[s] = rng.uniform() < cfg.p ? 1 : 0;
    angles.clear();
    for (uint32_t s = 0; s < n; ++s)
      if (site_on[s]) angles.push_back(cfg.scheme.draw(rng));
    size_t k = 0;
    for (uint32_t s = 0; s < n && res.passed; ++s) {
      if (!site_on[s]) continue;
      PhaseValue theta = angles[k++];
      double pc = cluster.outcome_distribution_x(s, theta);
      double pd = dense.outcome_distribution_x(s, theta);
      double dev = std::abs(pc - pd);
      res.max_probability_deviation =
          std::max(res.max_probability_deviation, dev);
      double u = rng.uniform();
      Outcome out = cluster.measure_x(s, theta, OutcomeSource::uniform(u));
      dense.measure_x(s, theta, OutcomeSource::forced(out.lambda));
      res.events.push_back(
          {t, 'x', s, s, theta.to_radians(), pc, pd, out.lambda});
      ++res.n_events;
      if (dev > cfg.tol.probability) fail(t, "x Born distribution mismatch");
    }
    if (!res.passed) break;

    DenseState rebuilt = DenseState::from_snapshot(cluster.snapshot());
    double fid = dense.fidelity(rebuilt);
    res.min_fidelity = std::min(res.min_fidelity, fid);
    if (fid < 1.0 - cfg.tol.fidelity) {
      fail(t, "state fidelity below tolerance");
      break;
    }

    Census cs = cluster.census();
    auto check_obs = [&](double structured, double brute,
                         const char* what) {
      double dev = std::abs(structured - brute);
      res.max_observable_deviation =
          std::max(res.max_observable_deviation, dev);
      if (dev > cfg.tol.observable && res.passed) fail(t, what);
    };
    for (const auto& region : cuts) {
      check_obs(entanglement_entropy(cs, region),
                dense.entanglement_entropy(region),
                "entanglement entropy mismatch");
      check_obs(participation_entropy(cs, region),
                dense.participation_entropy(region),
                "restricted participation entropy mismatch");
    }
    check_obs(participation_entropy(cs), dense.participation_entropy(),
              "participation entropy mismatch");
    if (n <= DenseState::max_sites_sre2) {
      double brute = dense.sre2();
      check_obs(full_magic(cs, MagicMeasure::stabilizer_renyi2), brute,
                "stabilizer Renyi-2 mismatch");
      const Region& half = cuts[n / 2 - 1];
      Region other;
      for (uint32_t s = 0; s < n; ++s)
        if (std::find(half.begin(), half.end(), s) == half.end())
          other.push_back(s);
      double mm = mutual_magic(cs, half, MagicMeasure::stabilizer_renyi2);
      double combo =
          brute - subsystem_magic(cs, half, MagicMeasure::stabilizer_renyi2) -
          subsystem_magic(cs, other, MagicMeasure::stabilizer_renyi2);
      check_obs(mm, combo, "mutual magic combination mismatch");
    }
  }
  res.final_state = cluster.snapshot();
  return res;
}

}  // namespace rbcsim
