#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "rbcsim/circuit.hpp"
#include "rbcsim/rng.hpp"

namespace rbcsim {

struct EnsembleResult {
  uint64_t master_seed = 0;
  uint32_t n_traj = 0;
  std::vector<SlotLabel> labels;
  std::vector<double> mean;
  std::vector<double> stderr_;  // sample std / sqrt(n); 0 when n == 1
};

// Receives every trajectory record (indexed) when per-trajectory output is
// requested. Calls arrive from worker threads in arbitrary order but with
// distinct indices.
class RecordSink {
 public:
  virtual ~RecordSink() = default;
  virtual void take(uint32_t index, const TrajectoryRecord& rec) = 0;
};

// Trajectory i always runs with derive_seed(master_seed, i), and reduction
// runs over fixed 32-trajectory chunks combined in chunk order, so the
// result is bit-identical for any worker count.
template <class State>
EnsembleResult run_ensemble(const CircuitParams& params, uint32_t n_traj,
                            uint64_t master_seed, uint32_t workers = 1,
                            RecordSink* sink = nullptr) {
  if (n_traj == 0) throw std::invalid_argument("n_traj must be positive");
  params.validate();
  Evaluator ev(params);
  const size_t slots = size_t{ev.slots_per_eval()} * params.plan.blocks();

  constexpr uint32_t chunk_size = 32;
  const uint32_t n_chunks = (n_traj + chunk_size - 1) / chunk_size;
  std::vector<std::vector<double>> chunk_sum(n_chunks),
      chunk_sumsq(n_chunks);

  std::atomic<uint32_t> next_chunk{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto work = [&]() {
    try {
      for (;;) {
        uint32_t c = next_chunk.fetch_add(1);
        if (c >= n_chunks || failed.load()) return;
        auto& sum = chunk_sum[c];
        auto& sumsq = chunk_sumsq[c];
        sum.assign(slots, 0.0);
        sumsq.assign(slots, 0.0);
        uint32_t lo = c * chunk_size;
        uint32_t hi = std::min(n_traj, lo + chunk_size);
        for (uint32_t i = lo; i < hi; ++i) {
          TrajectoryRecord rec =
              run_trajectory<State>(params, derive_seed(master_seed, i));
          for (size_t k = 0; k < slots; ++k) {
            sum[k] += rec.values[k];
            sumsq[k] += rec.values[k] * rec.values[k];
          }
          if (sink) sink->take(i, rec);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!first_error) first_error = std::current_exception();
      failed.store(true);
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (uint32_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  EnsembleResult res;
  res.master_seed = master_seed;
  res.n_traj = n_traj;
  res.labels = ev.labels(params.plan);
  res.mean.assign(slots, 0.0);
  res.stderr_.assign(slots, 0.0);
  std::vector<double> sum(slots, 0.0), sumsq(slots, 0.0);
  for (uint32_t c = 0; c < n_chunks; ++c)
    for (size_t k = 0; k < slots; ++k) {
      sum[k] += chunk_sum[c][k];
      sumsq[k] += chunk_sumsq[c][k];
    }
  const double n = n_traj;
  for (size_t k = 0; k < slots; ++k) {
    double m = sum[k] / n;
    res.mean[k] = m;
    if (n_traj > 1) {
      double var = (sumsq[k] - n * m * m) / (n - 1.0);
      res.stderr_[k] = std::sqrt(std::max(0.0, var) / n);
    }
  }
  return res;
}

inline EnsembleResult run_ensemble(const CircuitParams& params,
                                   EngineMode mode, uint32_t n_traj,
                                   uint64_t master_seed, uint32_t workers = 1,
                                   RecordSink* sink = nullptr) {
  if (mode == EngineMode::parity) {
    require_parity_compatible(params);
    return run_ensemble<ParityState>(params, n_traj, master_seed, workers,
                                     sink);
  }
  return run_ensemble<ClusterState>(params, n_traj, master_seed, workers,
                                    sink);
}

}  // namespace rbcsim
