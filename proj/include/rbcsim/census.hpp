#pragma once

#include <cstdint>
#include <vector>

#include "rbcsim/phase.hpp"

namespace rbcsim {

// Flat per-cluster summary extracted from an engine state. Observables are
// pure functions of this structure, so full and parity engines share one
// observable implementation.
//
// min_val/max_val are the extremes of a per-site scalar (site index in 1D,
// max(row, col) for square blocks in 2D) used by the profile evaluators: a
// cluster straddles cut l exactly when min_val < l <= max_val.
struct Census {
  struct Entry {
    uint32_t size = 0;
    bool odd = false;        // size parity; equals magic presence at theta=pi/4
    bool has_phase = false;  // full engine only
    PhaseValue phase;
    uint32_t min_val = 0;
    uint32_t max_val = 0;
  };

  uint32_t n_sites = 0;
  std::vector<uint32_t> site_cluster;  // site -> index into `clusters`
  std::vector<Entry> clusters;
};

}  // namespace rbcsim
