#pragma once

#include <cstdint>
#include <vector>

#include "rbcsim/phase.hpp"

namespace rbcsim {

// Plain description of one cluster: |b> + e^{i phase} |~b> on `sites`.
// sites[k] carries bit bits[k]; sites are listed in ascending order.
struct ClusterComponent {
  std::vector<uint32_t> sites;
  std::vector<uint8_t> bits;
  PhaseValue phase;
};

// Full product-state description; input format of the dense oracle.
struct StateSnapshot {
  uint32_t n_sites = 0;
  std::vector<ClusterComponent> clusters;
};

}  // namespace rbcsim
