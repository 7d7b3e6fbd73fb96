#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>

#include "mlgd/bsp.hpp"
#include "mlgd/graph.hpp"

namespace mlgd {

struct StatsTotals {
  std::int64_t supersteps = 0;
  std::int64_t messages = 0;
  std::int64_t bytes = 0;

  void add(const bsp::RunStats& s) {
    supersteps += s.supersteps_executed;
    for (auto m : s.messages_per_superstep) messages += m;
    for (auto b : s.bytes_per_superstep) bytes += b;
  }
};

/// Bundles the engine options shared by every BSP run of a pipeline and
/// derives a fresh seed per run, so repeated phases (e.g. election passes)
/// see independent randomness while the whole pipeline stays reproducible.
class PhaseRunner {
 public:
  PhaseRunner(int num_workers, std::uint64_t seed) : workers_(num_workers), seed_(seed) {}

  /// Optional locality-aware vertex -> worker map; round-robin when unset.
  std::function<std::unordered_map<VertexId, int>(const Graph&)> partitioner;
  bool shuffle_inboxes = false;

  int num_workers() const { return workers_; }
  std::uint64_t base_seed() const { return seed_; }

  bsp::EngineConfig config_for(const Graph& g) {
    bsp::EngineConfig cfg;
    cfg.num_workers = workers_;
    cfg.seed = mix64(seed_, ++phase_);
    cfg.shuffle_inboxes = shuffle_inboxes;
    if (partitioner) cfg.partition_map = partitioner(g);
    return cfg;
  }

  void record(const bsp::RunStats& s) { totals.add(s); }

  StatsTotals totals;

 private:
  int workers_;
  std::uint64_t seed_;
  std::uint64_t phase_ = 0;
};

}  // namespace mlgd
