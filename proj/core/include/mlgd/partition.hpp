#pragma once

#include <cstdint>
#include <unordered_map>

#include "mlgd/graph.hpp"

namespace mlgd {

struct PartitionMap {
  std::unordered_map<VertexId, int> assignment;
  int parts = 1;

  std::size_t size_of(int part) const {
    std::size_t c = 0;
    for (const auto& [v, p] : assignment)
      if (p == part) ++c;
    return c;
  }
};

struct PartitionConfig {
  int parts = 1;
  double epsilon = 0.05;  // balance slack
  int rounds = 30;
  std::uint64_t seed = 0;
};

/// Capacity-penalized label propagation: hash-seeded balanced assignment,
/// then `rounds` synchronous sweeps where each vertex adopts the label
/// score(l) = (neighbors with l) * (1 - load(l)/capacity), ties to the
/// smaller label. Moves that would exceed (1+epsilon)*ceil(n/parts) are
/// dropped, so balance holds after every round. Deterministic per seed.
PartitionMap partition(const Graph& g, const PartitionConfig& cfg);

std::int64_t cut_edges(const Graph& g, const PartitionMap& pm);

}  // namespace mlgd
