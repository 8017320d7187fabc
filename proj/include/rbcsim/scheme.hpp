#pragma once

#include <stdexcept>

#include "rbcsim/phase.hpp"
#include "rbcsim/rng.hpp"

namespace rbcsim {

// Distribution of the rotated-X measurement angle. RNG consumption per draw
// is fixed per kind (fixed: 0, dilute: 1, random_uniform: 1) so coupled runs
// that share a stream stay aligned.
struct AngleScheme {
  enum class Kind { fixed, dilute, random_uniform };

  Kind kind = Kind::fixed;
  PhaseValue theta = PhaseValue::exact(1);  // fixed and dilute
  double q = 0.0;                           // dilute: Pr(theta), else angle 0

  static AngleScheme fixed(PhaseValue theta) {
    return {Kind::fixed, theta, 0.0};
  }
  static AngleScheme dilute(PhaseValue theta, double q) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("q outside [0, 1]");
    return {Kind::dilute, theta, q};
  }
  static AngleScheme random_uniform() {
    return {Kind::random_uniform, PhaseValue::exact(0), 0.0};
  }

  PhaseValue draw(Xoshiro256pp& rng) const {
    switch (kind) {
      case Kind::fixed:
        return theta;
      case Kind::dilute:
        return rng.uniform() < q ? theta : PhaseValue::exact(0);
      case Kind::random_uniform:
        return PhaseValue::radians(2.0 * pi * rng.uniform());
    }
    throw std::logic_error("unhandled scheme kind");
  }

  // Every drawable angle is an exact multiple of pi/4.
  bool exact_protocol() const {
    return kind != Kind::random_uniform && theta.is_exact();
  }

  // Parity tracking is only sound when every angle is an odd multiple of
  // pi/4 (so each X-measurement shifts a phase by pi/4 mod pi/2).
  bool parity_compatible() const {
    return kind == Kind::fixed && theta.is_exact() &&
           (theta.exact_units() & 1) != 0;
  }
};

}  // namespace rbcsim
