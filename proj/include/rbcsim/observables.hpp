#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbcsim/census.hpp"
#include "rbcsim/phase.hpp"

namespace rbcsim {

enum class MagicMeasure { nullity, stabilizer_renyi2, t_unit };

// log2(4/3): stabilizer Renyi-2 entropy of a single qubit at phase pi/4.
inline constexpr double t_state_sre2 = 0.41503749927884381;

// Magic carried by one isolated cluster |b> + e^{i phi} |~b>; depends only
// on phi through the Clifford orbit {+-phi + k pi/2}, so all three measures
// are even in phi and pi/2-periodic.
inline double single_qubit_magic(PhaseValue phi, MagicMeasure measure,
                                 double tol = 1e-9) {
  switch (measure) {
    case MagicMeasure::nullity:
      return phi.is_stabilizer(tol) ? 0.0 : 1.0;
    case MagicMeasure::t_unit: {
      auto k = phi.snap_to_units(tol);
      if (!k)
        throw std::invalid_argument(
            "t_unit measure needs a phase that is a multiple of pi/4");
      return (*k & 1) ? 1.0 : 0.0;
    }
    case MagicMeasure::stabilizer_renyi2: {
      if (phi.is_exact()) return (phi.exact_units() & 1) ? t_state_sre2 : 0.0;
      double c = std::cos(phi.to_radians()), s = std::sin(phi.to_radians());
      double arg = 0.5 * (1.0 + c * c * c * c + s * s * s * s);
      return std::max(0.0, -std::log2(arg));
    }
  }
  throw std::logic_error("unhandled measure");
}

// Value of the measure on a pi/4 phase; curves are reported in these units
// so the choice of measure cancels for the pi/4 protocol.
inline double measure_t_value(MagicMeasure measure) {
  return measure == MagicMeasure::stabilizer_renyi2 ? t_state_sre2 : 1.0;
}

inline std::string measure_name(MagicMeasure m) {
  switch (m) {
    case MagicMeasure::nullity: return "nullity";
    case MagicMeasure::stabilizer_renyi2: return "sre2";
    case MagicMeasure::t_unit: return "t_unit";
  }
  return "?";
}

namespace detail {

// Parity-only census entries carry no phase; under the pi/4 protocol an odd
// cluster sits at an odd multiple of pi/4 and an even one at a stabilizer
// phase, which fixes the value of every supported measure.
inline double entry_magic(const Census::Entry& e, MagicMeasure measure) {
  if (e.has_phase) return single_qubit_magic(e.phase, measure);
  if (!e.odd) return 0.0;
  return measure == MagicMeasure::stabilizer_renyi2 ? t_state_sre2 : 1.0;
}

}  // namespace detail

using Region = std::vector<uint32_t>;

// Number of member sites each cluster has inside `region`.
inline std::vector<uint32_t> region_counts(const Census& cs,
                                           const Region& region) {
  std::vector<uint32_t> counts(cs.clusters.size(), 0);
  for (uint32_t s : region) {
    if (s >= cs.n_sites) throw std::invalid_argument("region site range");
    ++counts[cs.site_cluster[s]];
  }
  return counts;
}

inline double full_magic(const Census& cs, MagicMeasure measure) {
  double total = 0;
  for (const auto& e : cs.clusters) total += detail::entry_magic(e, measure);
  return total;
}

// Magic of the reduced state on `region`: clusters fully inside contribute
// their magic, clusters crossing the boundary are dephased and contribute 0.
inline double subsystem_magic(const Census& cs, const Region& region,
                              MagicMeasure measure) {
  auto counts = region_counts(cs, region);
  double total = 0;
  for (size_t c = 0; c < cs.clusters.size(); ++c)
    if (counts[c] == cs.clusters[c].size)
      total += detail::entry_magic(cs.clusters[c], measure);
  return total;
}

// Mutual magic M(psi) - M(rho_A) - M(rho_Ac): the magic carried by clusters
// straddling the boundary of `region`.
inline double mutual_magic(const Census& cs, const Region& region,
                           MagicMeasure measure) {
  auto counts = region_counts(cs, region);
  double total = 0;
  for (size_t c = 0; c < cs.clusters.size(); ++c)
    if (counts[c] > 0 && counts[c] < cs.clusters[c].size)
      total += detail::entry_magic(cs.clusters[c], measure);
  return total;
}

// Entanglement entropy of `region` in bits: one bit per straddling cluster.
inline double entanglement_entropy(const Census& cs, const Region& region) {
  auto counts = region_counts(cs, region);
  double total = 0;
  for (size_t c = 0; c < cs.clusters.size(); ++c)
    if (counts[c] > 0 && counts[c] < cs.clusters[c].size) total += 1.0;
  return total;
}

// Basis-participation entropy in bits: one bit per cluster.
inline double participation_entropy(const Census& cs) {
  return static_cast<double>(cs.clusters.size());
}

// Restriction to a region: every cluster intersecting it contributes one
// bit, whether it is cut by the boundary or contained.
inline double participation_entropy(const Census& cs, const Region& region) {
  auto counts = region_counts(cs, region);
  double total = 0;
  for (size_t c = 0; c < counts.size(); ++c)
    if (counts[c] > 0) total += 1.0;
  return total;
}

// S_part(A) + S_part(Ac) - S_part(full); structurally equals the number of
// straddling clusters (each is counted twice across the two restrictions).
inline double shannon_mutual_information(const Census& cs,
                                         const Region& region) {
  auto counts = region_counts(cs, region);
  double sa = 0, sac = 0;
  for (size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) sa += 1.0;
    if (counts[c] < cs.clusters[c].size) sac += 1.0;
  }
  return sa + sac - participation_entropy(cs);
}

struct TopologicalMagic {
  double value;               // M(ABC) + M(B) - M(AB) - M(BC)
  double touching_abc;        // magic of clusters meeting A, B and C
  double touching_ac_not_b;   // magic of clusters meeting A and C but not B
};

// Tripartite combination over a partition A|B|C of all sites. The exact
// evaluation uses four subsystem calls; the structural tallies (clusters
// reaching both A and C) are exposed alongside and must agree.
inline TopologicalMagic topological_magic(const Census& cs, const Region& a,
                                          const Region& b, const Region& c,
                                          MagicMeasure measure) {
  if (a.size() + b.size() + c.size() != cs.n_sites)
    throw std::invalid_argument("regions must partition the sites");
  Region ab, bc;
  ab.reserve(a.size() + b.size());
  bc.reserve(b.size() + c.size());
  ab.insert(ab.end(), a.begin(), a.end());
  ab.insert(ab.end(), b.begin(), b.end());
  bc.insert(bc.end(), b.begin(), b.end());
  bc.insert(bc.end(), c.begin(), c.end());

  TopologicalMagic out{};
  out.value = full_magic(cs, measure) + subsystem_magic(cs, b, measure) -
              subsystem_magic(cs, ab, measure) -
              subsystem_magic(cs, bc, measure);

  auto in_a = region_counts(cs, a);
  auto in_b = region_counts(cs, b);
  auto in_c = region_counts(cs, c);
  for (size_t k = 0; k < cs.clusters.size(); ++k) {
    bool ta = in_a[k] > 0, tb = in_b[k] > 0, tc = in_c[k] > 0;
    if (!(ta && tc)) continue;
    double m = detail::entry_magic(cs.clusters[k], measure);
    if (tb) out.touching_abc += m; else out.touching_ac_not_b += m;
  }
  return out;
}

// Sum of per-cluster weights over clusters straddling each cut l = 1..n_cuts
// in the census value coordinate (straddle: min_val < l <= max_val).
// weight_of(entry) -> double; O(n_cuts + n_clusters) via a difference array.
template <class WeightFn>
std::vector<double> straddle_profile(const Census& cs, uint32_t n_cuts,
                                     WeightFn weight_of) {
  std::vector<double> diff(n_cuts + 1, 0.0);
  for (const auto& e : cs.clusters) {
    if (e.min_val >= e.max_val) continue;
    double w = weight_of(e);
    if (w == 0.0) continue;
    uint32_t lo = e.min_val + 1;               // first straddled cut
    uint32_t hi = std::min(e.max_val, n_cuts); // last straddled cut
    if (lo > hi) continue;
    diff[lo - 1] += w;
    diff[hi] -= w;
  }
  std::vector<double> out(n_cuts);
  double acc = 0;
  for (uint32_t l = 0; l < n_cuts; ++l) {
    acc += diff[l];
    out[l] = acc;
  }
  return out;
}

inline std::vector<double> entanglement_profile(const Census& cs,
                                                uint32_t n_cuts) {
  return straddle_profile(cs, n_cuts, [](const Census::Entry&) { return 1.0; });
}

inline std::vector<double> mutual_magic_profile(const Census& cs,
                                                uint32_t n_cuts,
                                                MagicMeasure measure) {
  return straddle_profile(cs, n_cuts, [measure](const Census::Entry& e) {
    return detail::entry_magic(e, measure);
  });
}

}  // namespace rbcsim
