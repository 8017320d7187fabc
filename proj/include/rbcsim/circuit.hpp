#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbcsim/cluster_state.hpp"
#include "rbcsim/lattice.hpp"
#include "rbcsim/observables.hpp"
#include "rbcsim/outcome.hpp"
#include "rbcsim/parity_state.hpp"
#include "rbcsim/rng.hpp"
#include "rbcsim/scheme.hpp"

namespace rbcsim {

enum class ObservableId {
  magic_density,
  mutual_magic_half,
  mutual_magic_profile,
  topo_magic,
  entanglement_half,
  entanglement_profile,
  participation,
  shannon_mutual,
};

inline const char* observable_name(ObservableId id) {
  switch (id) {
    case ObservableId::magic_density: return "magic_density";
    case ObservableId::mutual_magic_half: return "mutual_magic_half";
    case ObservableId::mutual_magic_profile: return "mutual_magic_profile";
    case ObservableId::topo_magic: return "topo_magic";
    case ObservableId::entanglement_half: return "entanglement_half";
    case ObservableId::entanglement_profile: return "entanglement_profile";
    case ObservableId::participation: return "participation";
    case ObservableId::shannon_mutual: return "shannon_mutual";
  }
  return "?";
}

inline ObservableId observable_from_name(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(ObservableId::shannon_mutual); ++k) {
    auto id = static_cast<ObservableId>(k);
    if (name == observable_name(id)) return id;
  }
  throw std::invalid_argument("unknown observable: " + name);
}

// When observables are evaluated. Times are steps, strictly increasing,
// 1-based. With `average` set, values over all listed times are averaged
// into a single slot block (used for late-time window averaging).
struct EvalPlan {
  std::vector<uint32_t> times;
  bool average = false;

  static EvalPlan final_at(uint32_t t) { return {{t}, false}; }

  static EvalPlan every_step(uint32_t t_max, uint32_t stride = 1) {
    EvalPlan p;
    for (uint32_t t = stride; t <= t_max; t += stride) p.times.push_back(t);
    if (p.times.empty() || p.times.back() != t_max)
      p.times.push_back(t_max);
    return p;
  }

  static EvalPlan window(uint32_t t_from, uint32_t t_to) {
    EvalPlan p;
    p.average = true;
    for (uint32_t t = t_from; t <= t_to; ++t) p.times.push_back(t);
    return p;
  }

  void validate() const {
    if (times.empty()) throw std::invalid_argument("empty evaluation plan");
    for (size_t k = 0; k < times.size(); ++k)
      if (times[k] == 0 || (k > 0 && times[k] <= times[k - 1]))
        throw std::invalid_argument("times must be increasing and positive");
  }

  uint32_t blocks() const {
    return average ? 1 : static_cast<uint32_t>(times.size());
  }
};

struct CircuitParams {
  Lattice lattice;
  double p = 0.5;                     // per-site X probability; ZZ rate 1-p
  AngleScheme scheme = AngleScheme::fixed(PhaseValue::exact(1));
  EvalPlan plan = EvalPlan::final_at(1);
  std::vector<ObservableId> observables{ObservableId::magic_density};
  MagicMeasure measure = MagicMeasure::t_unit;
  PhaseValue initial_phase = PhaseValue::exact(1);

  void validate() const {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p outside [0, 1]");
    plan.validate();
    if (observables.empty())
      throw std::invalid_argument("no observables scheduled");
  }
};

struct SlotLabel {
  uint32_t time;
  ObservableId obs;
  uint32_t element;  // profile cut index (1-based l); 0 for scalars
};

// Evaluates the scheduled observables from one census per call. Magic-type
// values are reported in units of the measure's pi/4 value.
class Evaluator {
 public:
  explicit Evaluator(const CircuitParams& params)
      : lattice_(&params.lattice),
        observables_(params.observables),
        measure_(params.measure),
        inv_t_(1.0 / measure_t_value(params.measure)),
        half_(params.lattice.half_region()),
        n_cuts_(params.lattice.profile_cuts()) {
    for (ObservableId id : observables_) {
      if (id == ObservableId::topo_magic) tri_ = lattice_->tripartition();
      slots_per_eval_ += slot_count(id);
    }
  }

  uint32_t slots_per_eval() const { return slots_per_eval_; }

  uint32_t slot_count(ObservableId id) const {
    switch (id) {
      case ObservableId::mutual_magic_profile:
      case ObservableId::entanglement_profile:
        return n_cuts_;
      default:
        return 1;
    }
  }

  std::vector<SlotLabel> labels(const EvalPlan& plan) const {
    std::vector<SlotLabel> out;
    out.reserve(size_t{plan.blocks()} * slots_per_eval_);
    for (uint32_t b = 0; b < plan.blocks(); ++b) {
      uint32_t t = plan.average ? plan.times.back() : plan.times[b];
      for (ObservableId id : observables_) {
        uint32_t n = slot_count(id);
        for (uint32_t e = 0; e < n; ++e)
          out.push_back({t, id, n > 1 ? e + 1 : 0});
      }
    }
    return out;
  }

  template <class State>
  void evaluate_add(const State& st, double* out) const {
    const Lattice& lat = *lattice_;
    Census cs = st.census([&lat](uint32_t s) { return lat.profile_value(s); });
    for (ObservableId id : observables_) {
      switch (id) {
        case ObservableId::magic_density:
          *out++ += full_magic(cs, measure_) * inv_t_ / cs.n_sites;
          break;
        case ObservableId::mutual_magic_half:
          *out++ += mutual_magic(cs, half_, measure_) * inv_t_;
          break;
        case ObservableId::mutual_magic_profile: {
          auto prof = mutual_magic_profile(cs, n_cuts_, measure_);
          for (double v : prof) *out++ += v * inv_t_;
          break;
        }
        case ObservableId::topo_magic:
          *out++ +=
              topological_magic(cs, tri_[0], tri_[1], tri_[2], measure_).value *
              inv_t_;
          break;
        case ObservableId::entanglement_half:
          *out++ += entanglement_entropy(cs, half_);
          break;
        case ObservableId::entanglement_profile: {
          auto prof = entanglement_profile(cs, n_cuts_);
          for (double v : prof) *out++ += v;
          break;
        }
        case ObservableId::participation:
          *out++ += participation_entropy(cs);
          break;
        case ObservableId::shannon_mutual:
          *out++ += shannon_mutual_information(cs, half_);
          break;
      }
    }
  }

 private:
  const Lattice* lattice_;
  std::vector<ObservableId> observables_;
  MagicMeasure measure_;
  double inv_t_;
  Region half_;
  std::array<Region, 3> tri_;
  uint32_t n_cuts_ = 0;
  uint32_t slots_per_eval_ = 0;
};

// Engine-specific hooks; the parity engine ignores angles and outcome draws
// but the driver consumes the stream identically for both.
template <class State>
struct EngineOps;

template <>
struct EngineOps<ClusterState> {
  static ClusterState make(const CircuitParams& p) {
    return ClusterState(p.lattice.n_sites, p.initial_phase);
  }
  static void x(ClusterState& s, uint32_t site, PhaseValue theta, double u) {
    s.measure_x(site, theta, OutcomeSource::uniform(u));
  }
  static void zz(ClusterState& s, uint32_t i, uint32_t j, double u) {
    s.measure_zz(i, j, OutcomeSource::uniform(u));
  }
};

template <>
struct EngineOps<ParityState> {
  static ParityState make(const CircuitParams& p) {
    return ParityState(p.lattice.n_sites);
  }
  static void x(ParityState& s, uint32_t site, PhaseValue, double) {
    s.apply_x(site);
  }
  static void zz(ParityState& s, uint32_t i, uint32_t j, double) {
    s.apply_zz(i, j);
  }
};

// Scratch buffers reused across steps of one trajectory.
struct StepScratch {
  std::vector<uint8_t> edge_on, site_on;
  std::vector<PhaseValue> angles;
};

// One circuit step. RNG consumption order is part of the trajectory
// contract: all edge inclusion draws, then one outcome draw per included
// edge (canonical order), then all site inclusion draws, then angle draws
// for included sites, then one outcome draw per included site.
template <class State>
void step(State& st, const CircuitParams& params, Xoshiro256pp& rng,
          StepScratch& scratch) {
  const auto& edges = params.lattice.edges;
  const uint32_t n = params.lattice.n_sites;
  const double p = params.p;

  scratch.edge_on.resize(edges.size());
  for (size_t e = 0; e < edges.size(); ++e)
    scratch.edge_on[e] = rng.uniform() < 1.0 - p ? 1 : 0;
  for (size_t e = 0; e < edges.size(); ++e) {
    if (!scratch.edge_on[e]) continue;
    double u = rng.uniform();
    EngineOps<State>::zz(st, edges[e].first, edges[e].second, u);
  }

  scratch.site_on.resize(n);
  for (uint32_t s = 0; s < n; ++s)
    scratch.site_on[s] = rng.uniform() < p ? 1 : 0;
  scratch.angles.clear();
  for (uint32_t s = 0; s < n; ++s)
    if (scratch.site_on[s]) scratch.angles.push_back(params.scheme.draw(rng));
  size_t k = 0;
  for (uint32_t s = 0; s < n; ++s) {
    if (!scratch.site_on[s]) continue;
    double u = rng.uniform();
    EngineOps<State>::x(st, s, scratch.angles[k++], u);
  }
}

struct TrajectoryRecord {
  uint64_t seed = 0;
  std::vector<double> values;  // blocks() x slots_per_eval, time-major
};

template <class State>
TrajectoryRecord run_trajectory(const CircuitParams& params, uint64_t seed) {
  params.validate();
  Evaluator ev(params);
  State st = EngineOps<State>::make(params);
  Xoshiro256pp rng(seed);
  StepScratch scratch;

  TrajectoryRecord rec;
  rec.seed = seed;
  rec.values.assign(size_t{ev.slots_per_eval()} * params.plan.blocks(), 0.0);

  const auto& times = params.plan.times;
  size_t ti = 0;
  for (uint32_t t = 1; t <= times.back(); ++t) {
    step(st, params, rng, scratch);
    if (ti < times.size() && times[ti] == t) {
      double* out = params.plan.average
                        ? rec.values.data()
                        : rec.values.data() + ti * ev.slots_per_eval();
      ev.evaluate_add(st, out);
      ++ti;
    }
  }
  if (params.plan.average) {
    double inv = 1.0 / static_cast<double>(times.size());
    for (double& v : rec.values) v *= inv;
  }
  return rec;
}

enum class EngineMode { full, parity };

inline void require_parity_compatible(const CircuitParams& params) {
  if (!params.scheme.parity_compatible() ||
      !params.initial_phase.is_exact() ||
      (params.initial_phase.exact_units() & 1) == 0)
    throw std::invalid_argument(
        "parity engine needs a fixed odd multiple of pi/4 for the angle and "
        "the initial phase");
}

inline TrajectoryRecord run_trajectory(const CircuitParams& params,
                                       EngineMode mode, uint64_t seed) {
  if (mode == EngineMode::parity) {
    require_parity_compatible(params);
    return run_trajectory<ParityState>(params, seed);
  }
  return run_trajectory<ClusterState>(params, seed);
}

}  // namespace rbcsim
