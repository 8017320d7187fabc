#pragma once

// Umbrella header for the rotated-Bell-cluster simulation library.

#include "rbcsim/analysis.hpp"
#include "rbcsim/census.hpp"
#include "rbcsim/circuit.hpp"
#include "rbcsim/cluster_state.hpp"
#include "rbcsim/config.hpp"
#include "rbcsim/coupled.hpp"
#include "rbcsim/dense.hpp"
#include "rbcsim/ensemble.hpp"
#include "rbcsim/errors.hpp"
#include "rbcsim/io.hpp"
#include "rbcsim/lattice.hpp"
#include "rbcsim/observables.hpp"
#include "rbcsim/outcome.hpp"
#include "rbcsim/parity_state.hpp"
#include "rbcsim/phase.hpp"
#include "rbcsim/rng.hpp"
#include "rbcsim/scheme.hpp"
#include "rbcsim/snapshot.hpp"
#include "rbcsim/version.hpp"
