#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rbcsim/outcome.hpp"
#include "rbcsim/phase.hpp"
#include "rbcsim/snapshot.hpp"

namespace rbcsim {

// Brute-force state-vector reference. Site i occupies bit i of the basis
// index (site 0 = least significant bit). Everything here is deliberately
// direct: this class is the oracle the structured engine is checked against,
// so it shares no update logic with it.
class DenseState {
 public:
  static constexpr uint32_t max_sites = 12;
  static constexpr uint32_t max_sites_sre2 = 8;

  explicit DenseState(uint32_t n_sites)
      : n_(check_size(n_sites)), amps_(size_t{1} << n_sites) {
    amps_[0] = 1.0;
  }

  static DenseState from_snapshot(const StateSnapshot& snap) {
    DenseState st(snap.n_sites);
    std::vector<uint8_t> seen(snap.n_sites, 0);
    for (const auto& c : snap.clusters) {
      if (c.sites.empty() || c.sites.size() != c.bits.size())
        throw std::invalid_argument("malformed cluster in snapshot");
      for (uint32_t s : c.sites) {
        if (s >= snap.n_sites || seen[s])
          throw std::invalid_argument("snapshot is not a partition of sites");
        seen[s] = 1;
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw std::invalid_argument("snapshot leaves a site uncovered");

    // Expand the product over clusters; each cluster contributes its |b>
    // branch and its e^{i phase} |~b> branch with weight 1/sqrt(2).
    std::vector<std::pair<uint64_t, std::complex<double>>> terms{{0, 1.0}};
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (const auto& c : snap.clusters) {
      uint64_t pat0 = 0, pat1 = 0;
      for (size_t k = 0; k < c.sites.size(); ++k) {
        uint64_t m = uint64_t{1} << c.sites[k];
        if (c.bits[k]) pat0 |= m; else pat1 |= m;
      }
      std::complex<double> w1 =
          std::polar(1.0, c.phase.to_radians()) * inv_sqrt2;
      std::vector<std::pair<uint64_t, std::complex<double>>> next;
      next.reserve(terms.size() * 2);
      for (const auto& [idx, coef] : terms) {
        next.emplace_back(idx | pat0, coef * inv_sqrt2);
        next.emplace_back(idx | pat1, coef * w1);
      }
      terms.swap(next);
    }
    std::fill(st.amps_.begin(), st.amps_.end(), std::complex<double>{});
    for (const auto& [idx, coef] : terms) st.amps_[idx] += coef;
    return st;
  }

  uint32_t n_sites() const { return n_; }
  const std::vector<std::complex<double>>& amplitudes() const { return amps_; }

  double norm() const {
    double s = 0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
  }

  // Pr(lambda = +1) for the rotated-X operator e^{-i t Z/2} X e^{i t Z/2},
  // whose action is X~|0> = e^{i t}|1>, X~|1> = e^{-i t}|0>.
  double outcome_distribution_x(uint32_t site, PhaseValue theta) const {
    check_site(site);
    std::complex<double> eim = std::polar(1.0, -theta.to_radians());
    double expect = 0;
    const uint64_t bit = uint64_t{1} << site;
    for (uint64_t x = 0; x < amps_.size(); ++x) {
      if (x & bit) continue;
      expect += 2.0 * std::real(eim * std::conj(amps_[x]) * amps_[x | bit]);
    }
    return clamp01(0.5 * (1.0 + expect));
  }

  double outcome_distribution_zz(uint32_t i, uint32_t j) const {
    check_site(i);
    check_site(j);
    if (i == j) throw std::invalid_argument("zz needs two distinct sites");
    double expect = 0;
    const uint64_t bi = uint64_t{1} << i, bj = uint64_t{1} << j;
    for (uint64_t x = 0; x < amps_.size(); ++x) {
      bool odd = ((x & bi) != 0) != ((x & bj) != 0);
      expect += (odd ? -1.0 : 1.0) * std::norm(amps_[x]);
    }
    return clamp01(0.5 * (1.0 + expect));
  }

  Outcome measure_x(uint32_t site, PhaseValue theta, OutcomeSource src) {
    Outcome out = src.resolve(outcome_distribution_x(site, theta));
    const double lam = out.lambda;
    const std::complex<double> eip = std::polar(1.0, theta.to_radians());
    const std::complex<double> eim = std::conj(eip);
    const uint64_t bit = uint64_t{1} << site;
    for (uint64_t x = 0; x < amps_.size(); ++x) {
      if (x & bit) continue;
      std::complex<double> a0 = amps_[x], a1 = amps_[x | bit];
      amps_[x] = 0.5 * (a0 + lam * eim * a1);
      amps_[x | bit] = 0.5 * (lam * eip * a0 + a1);
    }
    renormalize(out.probability);
    return out;
  }

  Outcome measure_zz(uint32_t i, uint32_t j, OutcomeSource src) {
    Outcome out = src.resolve(outcome_distribution_zz(i, j));
    const uint64_t bi = uint64_t{1} << i, bj = uint64_t{1} << j;
    for (uint64_t x = 0; x < amps_.size(); ++x) {
      bool odd = ((x & bi) != 0) != ((x & bj) != 0);
      int lam = odd ? -1 : +1;
      if (lam != out.lambda) amps_[x] = 0;
    }
    renormalize(out.probability);
    return out;
  }

  // |<this|other>|, insensitive to global phase.
  double fidelity(const DenseState& other) const {
    if (other.n_ != n_) throw std::invalid_argument("size mismatch");
    std::complex<double> ip = 0;
    for (size_t x = 0; x < amps_.size(); ++x)
      ip += std::conj(amps_[x]) * other.amps_[x];
    return std::abs(ip);
  }

  // Von Neumann entropy of the reduced state on `region`, in bits.
  double entanglement_entropy(const std::vector<uint32_t>& region) const {
    auto [rows, cols] = split_masks(region);
    const auto& small_side = rows.size() <= cols.size() ? rows : cols;
    const auto& large_side = rows.size() <= cols.size() ? cols : rows;
    Eigen::MatrixXcd m(small_side.size(), large_side.size());
    for (size_t r = 0; r < small_side.size(); ++r)
      for (size_t c = 0; c < large_side.size(); ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            amps_[small_side[r] | large_side[c]];
    Eigen::MatrixXcd gram = m * m.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram,
                                                       Eigen::EigenvaluesOnly);
    double s = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      double lam = es.eigenvalues()[k];
      if (lam > 1e-14) s -= lam * std::log2(lam);
    }
    return s;
  }

  // Shannon entropy of |amp|^2 over the computational basis, in bits.
  double participation_entropy() const {
    double s = 0;
    for (const auto& a : amps_) {
      double w = std::norm(a);
      if (w > 1e-14) s -= w * std::log2(w);
    }
    return s;
  }

  // Shannon entropy of the diagonal of the reduced state on `region`.
  double participation_entropy(const std::vector<uint32_t>& region) const {
    auto [rows, cols] = split_masks(region);
    double s = 0;
    for (uint64_t r : rows) {
      double w = 0;
      for (uint64_t c : cols) w += std::norm(amps_[r | c]);
      if (w > 1e-14) s -= w * std::log2(w);
    }
    return s;
  }

  // Stabilizer Renyi-2 entropy: -log2( sum_P <P>^4 / 2^n ) over all 4^n
  // Pauli strings. Summed per X-mask via a Walsh-Hadamard transform over
  // Z-masks; the i^{|Y|} prefactor drops out of |<P>|^4.
  double sre2() const {
    if (n_ > max_sites_sre2)
      throw std::invalid_argument("sre2 limited to 8 sites");
    const size_t dim = amps_.size();
    std::vector<std::complex<double>> g(dim);
    double total = 0;
    for (uint64_t xm = 0; xm < dim; ++xm) {
      for (uint64_t x = 0; x < dim; ++x)
        g[x] = amps_[x] * std::conj(amps_[x ^ xm]);
      for (size_t h = 1; h < dim; h <<= 1) {
        for (size_t a = 0; a < dim; a += 2 * h) {
          for (size_t b = a; b < a + h; ++b) {
            auto u = g[b], v = g[b + h];
            g[b] = u + v;
            g[b + h] = u - v;
          }
        }
      }
      for (const auto& s : g) {
        double m2 = std::norm(s);
        total += m2 * m2;
      }
    }
    return -std::log2(total / static_cast<double>(dim));
  }

 private:
  static uint32_t check_size(uint32_t n) {
    if (n == 0 || n > max_sites)
      throw std::invalid_argument("dense oracle limited to 1..12 sites");
    return n;
  }

  void check_site(uint32_t s) const {
    if (s >= n_) throw std::invalid_argument("site index out of range");
  }

  static double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

  void renormalize(double prob) {
    if (prob <= 0) throw std::runtime_error("projection onto zero subspace");
    double inv = 1.0 / std::sqrt(prob);
    // Use the true post-projection norm, not the reported probability, so
    // numerical drift does not accumulate over long runs.
    double n2 = 0;
    for (const auto& a : amps_) n2 += std::norm(a);
    inv = n2 > 0 ? 1.0 / std::sqrt(n2) : inv;
    for (auto& a : amps_) a *= inv;
  }

  // Enumerate basis masks spanned by region sites and by the complement.
  std::pair<std::vector<uint64_t>, std::vector<uint64_t>> split_masks(
      const std::vector<uint32_t>& region) const {
    std::vector<uint8_t> in_region(n_, 0);
    for (uint32_t s : region) {
      check_site(s);
      if (in_region[s]) throw std::invalid_argument("duplicate site in region");
      in_region[s] = 1;
    }
    std::vector<uint32_t> a_sites, b_sites;
    for (uint32_t s = 0; s < n_; ++s)
      (in_region[s] ? a_sites : b_sites).push_back(s);
    return {masks_of(a_sites), masks_of(b_sites)};
  }

  static std::vector<uint64_t> masks_of(const std::vector<uint32_t>& sites) {
    std::vector<uint64_t> out(size_t{1} << sites.size(), 0);
    for (size_t v = 0; v < out.size(); ++v) {
      uint64_t m = 0;
      for (size_t k = 0; k < sites.size(); ++k)
        if (v & (size_t{1} << k)) m |= uint64_t{1} << sites[k];
      out[v] = m;
    }
    return out;
  }

  uint32_t n_;
  std::vector<std::complex<double>> amps_;
};

}  // namespace rbcsim
