#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rbcsim/census.hpp"

namespace rbcsim {

// Reduced tracker for protocols where every angle is an odd multiple of
// pi/4: only connectivity and cluster sizes matter, because a cluster then
// carries magic exactly when its size is odd. Phases, bits and outcome
// values are dropped entirely; the driver still consumes the same RNG
// stream, so full and parity runs can be coupled seed-for-seed.
//
// Representation: union-find over nodes. Detaching a site allocates a fresh
// node and leaves the old one behind as a ghost inside its tree; sizes are
// tracked at roots and ghosts never distort them.
class ParityState {
 public:
  explicit ParityState(uint32_t n_sites) { reset(n_sites); }

  void reset(uint32_t n_sites) {
    if (n_sites == 0) throw std::invalid_argument("empty system");
    n_sites_ = n_sites;
    n_clusters_ = n_sites;
    parent_.resize(n_sites);
    rank_.assign(n_sites, 0);
    size_.assign(n_sites, 1);
    node_of_.resize(n_sites);
    stamp_.assign(n_sites, 0);
    slot_.resize(n_sites);
    epoch_ = 0;
    for (uint32_t i = 0; i < n_sites; ++i) {
      parent_[i] = i;
      node_of_[i] = i;
    }
  }

  uint32_t n_sites() const { return n_sites_; }
  uint32_t n_clusters() const { return n_clusters_; }
  uint32_t label_of(uint32_t site) const {
    return find(node_of_[check(site)]);
  }
  uint32_t cluster_size(uint32_t site_label) const { return size_[site_label]; }

  // Rotated-X measurement: detach the site into a fresh singleton. A
  // measured singleton stays a singleton, so nothing changes.
  void apply_x(uint32_t site) {
    uint32_t r = find(node_of_[check(site)]);
    if (size_[r] == 1) return;
    --size_[r];
    node_of_[site] = new_node();
    ++n_clusters_;
  }

  // ZZ measurement: merge the two clusters; a same-cluster pair is a no-op.
  // The outcome value never matters for sizes, so none is taken.
  void apply_zz(uint32_t i, uint32_t j) {
    uint32_t ra = find(node_of_[check(i)]);
    uint32_t rb = find(node_of_[check(j)]);
    if (ra == rb) return;
    if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    size_[ra] += size_[rb];
    if (rank_[ra] == rank_[rb]) ++rank_[ra];
    --n_clusters_;
  }

  template <class ValueFn>
  Census census(ValueFn value_of) const {
    Census cs;
    cs.n_sites = n_sites_;
    cs.site_cluster.resize(n_sites_);
    cs.clusters.reserve(n_clusters_);
    ++epoch_;
    for (uint32_t s = 0; s < n_sites_; ++s) {
      uint32_t r = find(node_of_[s]);
      uint32_t v = value_of(s);
      if (stamp_[r] != epoch_) {
        stamp_[r] = epoch_;
        slot_[r] = static_cast<uint32_t>(cs.clusters.size());
        Census::Entry e;
        e.size = size_[r];
        e.odd = (size_[r] & 1u) != 0;
        e.has_phase = false;
        e.min_val = e.max_val = v;
        cs.clusters.push_back(e);
      } else {
        auto& e = cs.clusters[slot_[r]];
        e.min_val = std::min(e.min_val, v);
        e.max_val = std::max(e.max_val, v);
      }
      cs.site_cluster[s] = slot_[r];
    }
    return cs;
  }

  Census census() const {
    return census([](uint32_t s) { return s; });
  }

 private:
  uint32_t check(uint32_t site) const {
    if (site >= n_sites_) throw std::invalid_argument("site out of range");
    return site;
  }

  uint32_t find(uint32_t v) const {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];  // path halving
      v = parent_[v];
    }
    return v;
  }

  uint32_t new_node() {
    uint32_t id = static_cast<uint32_t>(parent_.size());
    parent_.push_back(id);
    rank_.push_back(0);
    size_.push_back(1);
    stamp_.push_back(0);
    slot_.push_back(0);
    return id;
  }

  uint32_t n_sites_ = 0;
  uint32_t n_clusters_ = 0;
  mutable std::vector<uint32_t> parent_;
  std::vector<uint8_t> rank_;
  std::vector<uint32_t> size_;
  std::vector<uint32_t> node_of_;
  mutable std::vector<uint32_t> stamp_, slot_;
  mutable uint32_t epoch_ = 0;
};

}  // namespace rbcsim
