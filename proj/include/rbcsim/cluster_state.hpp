#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rbcsim/census.hpp"
#include "rbcsim/outcome.hpp"
#include "rbcsim/phase.hpp"
#include "rbcsim/snapshot.hpp"

namespace rbcsim {

// Classical tracker for states that are tensor products of two-component
// clusters |b> + e^{i p} |~b>. Every site belongs to exactly one cluster;
// cluster records are indexed by label, member sets are intrusive circular
// lists over sites. Merges relabel the smaller member set (weighted union),
// so at most n_sites labels are ever live and labels stay below n_sites.
class ClusterState {
 public:
  explicit ClusterState(uint32_t n_sites,
                        PhaseValue phase = PhaseValue::exact(1))
      : ClusterState(n_sites, std::vector<PhaseValue>(n_sites, phase)) {}

  ClusterState(uint32_t n_sites, const std::vector<PhaseValue>& phases) {
    if (n_sites == 0) throw std::invalid_argument("empty system");
    if (phases.size() != n_sites)
      throw std::invalid_argument("one initial phase per site required");
    n_sites_ = n_sites;
    label_.resize(n_sites);
    bit_.assign(n_sites, 0);
    next_.resize(n_sites);
    prev_.resize(n_sites);
    records_.assign(n_sites, Record{});
    for (uint32_t i = 0; i < n_sites; ++i) {
      label_[i] = i;
      next_[i] = prev_[i] = i;
      records_[i] = Record{phases[i], 1, i};
    }
    n_clusters_ = n_sites;
  }

  static ClusterState from_snapshot(const StateSnapshot& snap) {
    ClusterState st(snap.n_sites);
    for (auto& r : st.records_) r.size = 0;
    st.free_labels_.clear();
    st.n_clusters_ = 0;
    std::vector<uint8_t> seen(snap.n_sites, 0);
    for (const auto& c : snap.clusters) {
      if (c.sites.empty() || c.sites.size() != c.bits.size())
        throw std::invalid_argument("malformed cluster");
      uint32_t lbl = *std::min_element(c.sites.begin(), c.sites.end());
      for (size_t k = 0; k < c.sites.size(); ++k) {
        uint32_t s = c.sites[k];
        if (s >= snap.n_sites || seen[s])
          throw std::invalid_argument("snapshot is not a partition");
        seen[s] = 1;
        st.label_[s] = lbl;
        st.bit_[s] = c.bits[k] ? 1 : 0;
        uint32_t sn = c.sites[(k + 1) % c.sites.size()];
        uint32_t sp = c.sites[(k + c.sites.size() - 1) % c.sites.size()];
        st.next_[s] = sn;
        st.prev_[s] = sp;
      }
      st.records_[lbl] =
          Record{c.phase, static_cast<uint32_t>(c.sites.size()), c.sites[0]};
      ++st.n_clusters_;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw std::invalid_argument("snapshot leaves a site uncovered");
    for (uint32_t l = 0; l < snap.n_sites; ++l)
      if (st.records_[l].size == 0) st.free_labels_.push_back(l);
    return st;
  }

  uint32_t n_sites() const { return n_sites_; }
  uint32_t n_clusters() const { return n_clusters_; }
  uint32_t label_of(uint32_t site) const { return label_[check(site)]; }
  int bit_of(uint32_t site) const { return bit_[check(site)]; }

  uint32_t cluster_size(uint32_t label) const {
    return live(label).size;
  }

  // Stored representative phase; defined up to the reference-bit convention,
  // which can only negate it.
  PhaseValue canonical_phase(uint32_t label) const {
    return live(label).phase;
  }

  std::vector<uint32_t> members(uint32_t label) const {
    const Record& r = live(label);
    std::vector<uint32_t> out;
    out.reserve(r.size);
    uint32_t s = r.head;
    do {
      out.push_back(s);
      s = next_[s];
    } while (s != r.head);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Pr(lambda = +1) for a rotated-X measurement at `site` with angle theta.
  double outcome_distribution_x(uint32_t site, PhaseValue theta) const {
    const Record& r = records_[label_[check(site)]];
    if (r.size >= 2) return 0.5;
    PhaseValue eff = bit_[site] ? -r.phase : r.phase;
    return singleton_x_p_plus(eff, theta);
  }

  double outcome_distribution_zz(uint32_t i, uint32_t j) const {
    check(i);
    check(j);
    if (i == j) throw std::invalid_argument("zz needs two distinct sites");
    if (label_[i] != label_[j]) return 0.5;
    return bit_[i] == bit_[j] ? 1.0 : 0.0;
  }

  // Rotated-X measurement. The measured site always ends in a fresh
  // singleton with bit 0 and phase theta (+pi when lambda = -1); a surviving
  // cluster keeps phase p - (-1)^{b_site} theta (+pi when lambda = -1).
  Outcome measure_x(uint32_t site, PhaseValue theta, OutcomeSource src) {
    uint32_t lbl = label_[check(site)];
    Record& r = records_[lbl];
    if (r.size == 1) {
      PhaseValue eff = bit_[site] ? -r.phase : r.phase;
      Outcome out = src.resolve(singleton_x_p_plus(eff, theta));
      r.phase = out.lambda < 0 ? theta.plus_pi() : theta;
      bit_[site] = 0;
      return out;
    }
    Outcome out = src.resolve(0.5);
    PhaseValue rest = bit_[site] ? r.phase + theta : r.phase - theta;
    if (out.lambda < 0) rest = rest.plus_pi();
    r.phase = rest;
    unlink(site, r);
    r.size -= 1;

    uint32_t nl = alloc_label();
    records_[nl] =
        Record{out.lambda < 0 ? theta.plus_pi() : theta, 1, site};
    label_[site] = nl;
    bit_[site] = 0;
    next_[site] = prev_[site] = site;
    ++n_clusters_;
    return out;
  }

  // ZZ measurement. Same cluster: deterministic, state untouched. Distinct
  // clusters: fair coin; the smaller member set is relabeled into the
  // larger. On a mismatched outcome the relabeled side's bits flip and the
  // absorbed phase enters with a minus sign (equivalent, up to global phase,
  // to flipping the other side).
  Outcome measure_zz(uint32_t i, uint32_t j, OutcomeSource src) {
    check(i);
    check(j);
    if (i == j) throw std::invalid_argument("zz needs two distinct sites");
    uint32_t li = label_[i], lj = label_[j];
    if (li == lj) {
      double p_plus = bit_[i] == bit_[j] ? 1.0 : 0.0;
      return src.resolve(p_plus);
    }
    Outcome out = src.resolve(0.5);
    bool match = (out.lambda == +1) == (bit_[i] == bit_[j]);

    uint32_t keep = li, lose = lj;
    if (records_[lose].size > records_[keep].size ||
        (records_[lose].size == records_[keep].size && lose < keep))
      std::swap(keep, lose);
    Record& rk = records_[keep];
    Record& rl = records_[lose];

    PhaseValue merged = match ? rk.phase + rl.phase : rk.phase - rl.phase;
    uint32_t s = rl.head;
    do {
      label_[s] = keep;
      if (!match) bit_[s] ^= 1;
      s = next_[s];
    } while (s != rl.head);

    uint32_t a = rk.head, b = rl.head;
    uint32_t an = next_[a], bn = next_[b];
    next_[a] = bn;
    prev_[bn] = a;
    next_[b] = an;
    prev_[an] = b;

    rk.size += rl.size;
    rk.phase = merged;
    rl.size = 0;
    free_labels_.push_back(lose);
    --n_clusters_;
    return out;
  }

  StateSnapshot snapshot() const {
    StateSnapshot snap;
    snap.n_sites = n_sites_;
    snap.clusters.reserve(n_clusters_);
    for (uint32_t l = 0; l < records_.size(); ++l) {
      if (records_[l].size == 0) continue;
      ClusterComponent c;
      c.sites = members(l);
      c.bits.reserve(c.sites.size());
      for (uint32_t s : c.sites) c.bits.push_back(bit_[s]);
      c.phase = records_[l].phase;
      snap.clusters.push_back(std::move(c));
    }
    return snap;
  }

  template <class ValueFn>
  Census census(ValueFn value_of) const {
    Census cs;
    cs.n_sites = n_sites_;
    cs.site_cluster.resize(n_sites_);
    cs.clusters.reserve(n_clusters_);
    std::vector<uint32_t> remap(n_sites_, UINT32_MAX);
    for (uint32_t s = 0; s < n_sites_; ++s) {
      uint32_t lbl = label_[s];
      uint32_t idx = remap[lbl];
      uint32_t v = value_of(s);
      if (idx == UINT32_MAX) {
        idx = static_cast<uint32_t>(cs.clusters.size());
        remap[lbl] = idx;
        const Record& r = records_[lbl];
        Census::Entry e;
        e.size = r.size;
        e.odd = (r.size & 1u) != 0;
        e.has_phase = true;
        e.phase = r.phase;
        e.min_val = e.max_val = v;
        cs.clusters.push_back(e);
      } else {
        auto& e = cs.clusters[idx];
        e.min_val = std::min(e.min_val, v);
        e.max_val = std::max(e.max_val, v);
      }
      cs.site_cluster[s] = idx;
    }
    return cs;
  }

  Census census() const {
    return census([](uint32_t s) { return s; });
  }

  // O(n) structural self-check used by the fuzz tests; throws on violation.
  void check_invariants() const {
    if (records_.size() != n_sites_) throw std::logic_error("record table");
    uint64_t total = 0;
    uint32_t live_count = 0;
    std::vector<uint8_t> visited(n_sites_, 0);
    for (uint32_t l = 0; l < records_.size(); ++l) {
      const Record& r = records_[l];
      if (r.size == 0) continue;
      ++live_count;
      total += r.size;
      uint32_t s = r.head, steps = 0;
      do {
        if (label_[s] != l) throw std::logic_error("label/list mismatch");
        if (visited[s]) throw std::logic_error("site in two clusters");
        visited[s] = 1;
        if (next_[prev_[s]] != s || prev_[next_[s]] != s)
          throw std::logic_error("list links broken");
        s = next_[s];
        if (++steps > r.size) throw std::logic_error("list longer than size");
      } while (s != r.head);
      if (steps != r.size) throw std::logic_error("list shorter than size");
    }
    if (total != n_sites_) throw std::logic_error("sizes do not sum to n");
    if (live_count != n_clusters_) throw std::logic_error("cluster count");
    if (live_count + free_labels_.size() != n_sites_)
      throw std::logic_error("label bookkeeping");
  }

 private:
  struct Record {
    PhaseValue phase;
    uint32_t size = 0;  // 0 marks a free label
    uint32_t head = 0;
  };

  uint32_t check(uint32_t site) const {
    if (site >= n_sites_) throw std::invalid_argument("site out of range");
    return site;
  }

  const Record& live(uint32_t label) const {
    if (label >= records_.size() || records_[label].size == 0)
      throw std::invalid_argument("unknown cluster label");
    return records_[label];
  }

  static double singleton_x_p_plus(PhaseValue eff, PhaseValue theta) {
    if (eff.is_exact() && theta.is_exact()) {
      // cos^2(k * pi/8) for k = (eff - theta) in pi/4 units; exact 0/1/.5
      // endpoints keep deterministic branches crisp.
      static const double table[8] = {1.0,
                                      0.85355339059327373,
                                      0.5,
                                      0.14644660940672624,
                                      0.0,
                                      0.14644660940672624,
                                      0.5,
                                      0.85355339059327373};
      return table[(eff - theta).exact_units()];
    }
    double d = eff.to_radians() - theta.to_radians();
    double c = std::cos(0.5 * d);
    return std::min(1.0, std::max(0.0, c * c));
  }

  void unlink(uint32_t site, Record& r) {
    uint32_t p = prev_[site], n = next_[site];
    next_[p] = n;
    prev_[n] = p;
    if (r.head == site) r.head = n;
  }

  uint32_t alloc_label() {
    // A detach only happens on a cluster of size >= 2, so a free label
    // always exists (live clusters < n_sites).
    uint32_t l = free_labels_.back();
    free_labels_.pop_back();
    return l;
  }

  uint32_t n_sites_ = 0;
  uint32_t n_clusters_ = 0;
  std::vector<uint32_t> label_;
  std::vector<uint8_t> bit_;
  std::vector<uint32_t> next_, prev_;
  std::vector<Record> records_;
  std::vector<uint32_t> free_labels_;
};

}  // namespace rbcsim
