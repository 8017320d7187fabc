#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace rbcsim {

inline constexpr double pi = 3.141592653589793238462643383279502884;

enum class PhaseMode : uint8_t { exact, real };

// Phase of a cluster, either an exact multiple of pi/4 (stored as an integer
// mod 8, no drift) or a real angle mod 2*pi. Arithmetic stays exact as long as
// both operands are exact; any real operand demotes the result to real.
class PhaseValue {
 public:
  constexpr PhaseValue() = default;

  static constexpr PhaseValue exact(long k) {
    PhaseValue p;
    p.mode_ = PhaseMode::exact;
    p.k_ = static_cast<int8_t>(((k % 8) + 8) % 8);
    return p;
  }

  static PhaseValue radians(double phi) {
    PhaseValue p;
    p.mode_ = PhaseMode::real;
    p.phi_ = wrap_2pi(phi);
    return p;
  }

  PhaseMode mode() const { return mode_; }
  bool is_exact() const { return mode_ == PhaseMode::exact; }

  // Value in units of pi/4, in [0, 8). Exact mode only.
  int exact_units() const {
    if (!is_exact()) throw std::logic_error("exact_units on a real-mode phase");
    return k_;
  }

  double to_radians() const {
    return is_exact() ? static_cast<double>(k_) * (pi / 4.0) : phi_;
  }

  PhaseValue operator+(PhaseValue o) const {
    if (is_exact() && o.is_exact()) return exact(k_ + o.k_);
    return radians(to_radians() + o.to_radians());
  }

  PhaseValue operator-(PhaseValue o) const {
    if (is_exact() && o.is_exact()) return exact(k_ - o.k_);
    return radians(to_radians() - o.to_radians());
  }

  PhaseValue operator-() const {
    return is_exact() ? exact(-k_) : radians(-phi_);
  }

  PhaseValue plus_pi() const {
    return is_exact() ? exact(k_ + 4) : radians(phi_ + pi);
  }

  // True when the phase is a multiple of pi/2, i.e. the single-cluster state
  // is a stabilizer state.
  bool is_stabilizer(double tol = 1e-9) const {
    if (is_exact()) return (k_ % 2) == 0;
    return nearest_multiple_distance(phi_, pi / 2.0) < tol;
  }

  // Nearest integer k with phase ~ k*pi/4, if within tol; empty otherwise.
  std::optional<int> snap_to_units(double tol = 1e-9) const {
    if (is_exact()) return k_;
    double q = phi_ / (pi / 4.0);
    long k = std::lround(q);
    if (std::abs(phi_ - static_cast<double>(k) * (pi / 4.0)) < tol)
      return static_cast<int>(((k % 8) + 8) % 8);
    return std::nullopt;
  }

  static double wrap_2pi(double phi) {
    double w = std::fmod(phi, 2.0 * pi);
    if (w < 0) w += 2.0 * pi;
    // fmod can return exactly 2*pi after the correction when phi is a tiny
    // negative number; fold that back to zero.
    if (w >= 2.0 * pi) w = 0.0;
    return w;
  }

 private:
  static double nearest_multiple_distance(double x, double unit) {
    double r = std::remainder(x, unit);
    return std::abs(r);
  }

  PhaseMode mode_ = PhaseMode::exact;
  int8_t k_ = 0;       // exact mode: units of pi/4 in [0, 8)
  double phi_ = 0.0;   // real mode: radians in [0, 2*pi)
};

// Angular distance mod 2*pi; used by tests and tolerance checks.
inline double phase_distance(PhaseValue a, PhaseValue b) {
  double d = std::remainder(a.to_radians() - b.to_radians(), 2.0 * pi);
  return std::abs(d);
}

inline std::string to_string(PhaseValue p) {
  if (p.is_exact()) return std::to_string(p.exact_units()) + "*pi/4";
  return std::to_string(p.to_radians()) + " rad";
}

}  // namespace rbcsim
