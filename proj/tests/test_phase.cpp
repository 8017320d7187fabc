#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rbcsim/phase.hpp"

using namespace rbcsim;

TEST_CASE("exact phases wrap modulo 8 units") {
  REQUIRE(PhaseValue::exact(9).exact_units() == 1);
  REQUIRE(PhaseValue::exact(-1).exact_units() == 7);
  REQUIRE(PhaseValue::exact(8).exact_units() == 0);
  REQUIRE(PhaseValue::exact(-13).exact_units() == 3);
}

TEST_CASE("exact arithmetic stays exact, any real operand demotes") {
  auto a = PhaseValue::exact(3);
  auto b = PhaseValue::exact(7);
  REQUIRE((a + b).is_exact());
  REQUIRE((a + b).exact_units() == 2);
  REQUIRE((a - b).exact_units() == 4);
  REQUIRE((-a).exact_units() == 5);
  REQUIRE(a.plus_pi().exact_units() == 7);

  auto r = PhaseValue::radians(0.25);
  REQUIRE_FALSE((a + r).is_exact());
  REQUIRE(std::abs((a + r).to_radians() - (3 * pi / 4 + 0.25)) < 1e-12);
}

TEST_CASE("radians constructor wraps into [0, 2pi)") {
  REQUIRE(std::abs(PhaseValue::radians(2 * pi + 0.3).to_radians() - 0.3) < 1e-12);
  double w = PhaseValue::radians(-0.3).to_radians();
  REQUIRE(w >= 0.0);
  REQUIRE(std::abs(w - (2 * pi - 0.3)) < 1e-12);
}

TEST_CASE("exact_units on a real phase throws") {
  REQUIRE_THROWS_AS(PhaseValue::radians(0.3).exact_units(), std::logic_error);
}

TEST_CASE("stabilizer test accepts multiples of pi/2 only") {
  REQUIRE(PhaseValue::exact(0).is_stabilizer());
  REQUIRE(PhaseValue::exact(2).is_stabilizer());
  REQUIRE(PhaseValue::exact(4).is_stabilizer());
  REQUIRE_FALSE(PhaseValue::exact(1).is_stabilizer());
  REQUIRE_FALSE(PhaseValue::exact(5).is_stabilizer());
  REQUIRE(PhaseValue::radians(pi / 2).is_stabilizer());
  REQUIRE(PhaseValue::radians(3 * pi / 2 + 1e-12).is_stabilizer());
  REQUIRE_FALSE(PhaseValue::radians(0.3).is_stabilizer());
}

TEST_CASE("snapping to pi/4 units tolerates rounding noise only") {
  auto near = PhaseValue::radians(pi / 4 + 1e-12);
  auto snapped = near.snap_to_units(1e-9);
  REQUIRE(snapped.has_value());
  REQUIRE(*snapped == 1);
  REQUIRE(PhaseValue::radians(0.3).snap_to_units(1e-9) == std::nullopt);
  // 2pi wraps back to unit 0
  auto zero = PhaseValue::radians(2 * pi - 1e-13).snap_to_units(1e-9);
  REQUIRE(zero.has_value());
  REQUIRE(*zero == 0);
}

TEST_CASE("phase distance is a metric on the circle") {
  auto a = PhaseValue::exact(7);
  auto b = PhaseValue::exact(1);
  REQUIRE(std::abs(phase_distance(a, b) - pi / 2) < 1e-12);
  REQUIRE(std::abs(phase_distance(b, a) - pi / 2) < 1e-12);
  REQUIRE(phase_distance(a, a) == 0.0);
  REQUIRE(std::abs(phase_distance(PhaseValue::radians(0.1),
                                  PhaseValue::radians(2 * pi - 0.1)) -
                   0.2) < 1e-12);
}

TEST_CASE("exact phases accumulate without drift") {
  auto p = PhaseValue::exact(1);
  for (int i = 0; i < 100000; ++i) p = p + PhaseValue::exact(3);
  REQUIRE(p.is_exact());
  REQUIRE(p.exact_units() == (1 + 3 * 100000) % 8);
}
