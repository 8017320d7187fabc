#pragma once

#include <stdexcept>

namespace rbcsim {

struct Outcome {
  int lambda;          // +1 or -1
  double probability;  // Born probability of the realized outcome, > 0
};

// Supplies the randomness for one measurement: either a uniform draw in
// [0, 1) mapped through the Born distribution, or an externally forced
// outcome (used when a second engine replays the same trajectory).
class OutcomeSource {
 public:
  static OutcomeSource uniform(double u) { return OutcomeSource(u, 0); }
  static OutcomeSource forced(int lambda) { return OutcomeSource(0.0, lambda); }

  // p_plus is Pr(lambda = +1). Returns the realized outcome.
  Outcome resolve(double p_plus) const {
    if (forced_ != 0) {
      double p = forced_ > 0 ? p_plus : 1.0 - p_plus;
      if (p <= 0.0)
        throw std::runtime_error("forced outcome has zero Born probability");
      return {forced_, p};
    }
    if (u_ < p_plus) return {+1, p_plus};
    return {-1, 1.0 - p_plus};
  }

  bool is_forced() const { return forced_ != 0; }

 private:
  OutcomeSource(double u, int forced) : u_(u), forced_(forced) {}
  double u_;
  int forced_;
};

}  // namespace rbcsim
