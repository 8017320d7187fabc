#pragma once

#include <stdexcept>

namespace rbcsim {

// Error classes the CLI maps to distinct exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Engine mode or magic measure incompatible with the angle scheme.
struct SchemeCompatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rbcsim
