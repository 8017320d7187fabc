#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rbcsim/observables.hpp"

namespace rbcsim {

enum class Boundary { periodic, open };

struct LatticeSpec {
  uint32_t dimension = 1;  // 1 = chain, 2 = square L x L
  uint32_t length = 0;     // linear size L
  Boundary boundary = Boundary::periodic;
};

// Site/edge layout of the measurement pattern. Sites are numbered 0..N-1,
// row-major in 2D. Edges are listed in canonical ascending order: 1D bonds
// (i, i+1) then the wrap bond; 2D per site the right bond then the down
// bond. The driver consumes inclusion draws in exactly this order.
struct Lattice {
  LatticeSpec spec;
  uint32_t n_sites = 0;
  std::vector<std::pair<uint32_t, uint32_t>> edges;

  uint32_t length() const { return spec.length; }
  uint32_t row(uint32_t site) const { return site / spec.length; }
  uint32_t col(uint32_t site) const { return site % spec.length; }

  // Coordinate used by cut profiles: site index along the chain in 1D,
  // max(row, col) in 2D so cut l corresponds to the l x l corner block.
  uint32_t profile_value(uint32_t site) const {
    if (spec.dimension == 1) return site;
    return std::max(row(site), col(site));
  }

  uint32_t profile_cuts() const {
    return spec.dimension == 1 ? n_sites - 1 : spec.length / 2;
  }

  // First half of the system: prefix of the chain, or the top L/2 rows.
  Region half_region() const {
    uint32_t cut =
        spec.dimension == 1 ? n_sites / 2 : (spec.length / 2) * spec.length;
    Region r(cut);
    for (uint32_t s = 0; s < cut; ++s) r[s] = s;
    return r;
  }

  // Square corner block of side l (2D), or chain prefix of length l (1D).
  Region block_region(uint32_t l) const {
    Region r;
    if (spec.dimension == 1) {
      for (uint32_t s = 0; s < l && s < n_sites; ++s) r.push_back(s);
      return r;
    }
    for (uint32_t s = 0; s < n_sites; ++s)
      if (row(s) < l && col(s) < l) r.push_back(s);
    return r;
  }

  // A|B|C partition of the chain with |A| = |C| = L/4 and |B| = L/2.
  std::array<Region, 3> tripartition() const {
    if (spec.dimension != 1 || spec.length % 4 != 0)
      throw std::invalid_argument(
          "tripartition needs a chain with L divisible by 4");
    uint32_t q = spec.length / 4;
    Region a, b, c;
    for (uint32_t s = 0; s < spec.length; ++s) {
      if (s < q) a.push_back(s);
      else if (s < 3 * q) b.push_back(s);
      else c.push_back(s);
    }
    return {a, b, c};
  }
};

inline Lattice build_lattice(LatticeSpec spec) {
  if (spec.length < 2) throw std::invalid_argument("length must be >= 2");
  if (spec.dimension != 1 && spec.dimension != 2)
    throw std::invalid_argument("dimension must be 1 or 2");
  Lattice lat;
  lat.spec = spec;
  const uint32_t L = spec.length;
  if (spec.dimension == 1) {
    lat.n_sites = L;
    for (uint32_t i = 0; i + 1 < L; ++i) lat.edges.emplace_back(i, i + 1);
    if (spec.boundary == Boundary::periodic) lat.edges.emplace_back(L - 1, 0);
  } else {
    lat.n_sites = L * L;
    for (uint32_t s = 0; s < lat.n_sites; ++s) {
      uint32_t r = s / L, c = s % L;
      if (c + 1 < L) lat.edges.emplace_back(s, s + 1);
      else if (spec.boundary == Boundary::periodic)
        lat.edges.emplace_back(s, s - (L - 1));
      if (r + 1 < L) lat.edges.emplace_back(s, s + L);
      else if (spec.boundary == Boundary::periodic)
        lat.edges.emplace_back(s, c);
    }
  }
  return lat;
}

}  // namespace rbcsim
