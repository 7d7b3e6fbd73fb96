#pragma once

// Independent reference implementations the production code is checked
// against. Everything here is deliberately the dumbest correct algorithm.

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>
#include <vector>

#include "mlgd/graph.hpp"
#include "mlgd/metrics.hpp"
#include "mlgd/solar_merger.hpp"

namespace mlgd::testing {

/// Hop distances from `src` up to `max_depth` (excludes src itself).
inline std::unordered_map<VertexId, std::uint16_t> bfs_within(const Graph& g, VertexId src,
                                                              std::uint16_t max_depth) {
  std::unordered_map<VertexId, std::uint16_t> dist;
  std::deque<std::pair<std::uint32_t, std::uint16_t>> q;
  std::vector<char> seen(g.vertex_count(), 0);
  const auto s = g.index_of(src);
  seen[s] = 1;
  q.push_back({s, 0});
  while (!q.empty()) {
    const auto [v, d] = q.front();
    q.pop_front();
    if (d == max_depth) continue;
    for (const auto& nb : g.neighbors(v)) {
      if (seen[nb.index]) continue;
      seen[nb.index] = 1;
      dist.emplace(nb.id, static_cast<std::uint16_t>(d + 1));
      q.push_back({nb.index, static_cast<std::uint16_t>(d + 1)});
    }
  }
  return dist;
}

/// O(m^2) crossing count on the same perturbed coordinates the sweep uses.
inline std::int64_t brute_force_crossings(const Graph& g, const Layout& l) {
  const Layout pl = perturb_for_crossings(g, l);
  struct Seg {
    Vec2 a, b;
    VertexId u, v;
  };
  std::vector<Seg> segs;
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    const VertexId u = g.id_at(i);
    for (const auto& nb : g.neighbors(i))
      if (u < nb.id) segs.push_back({pl.at(u), pl.at(nb.id), u, nb.id});
  }
  std::int64_t count = 0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      const Seg& a = segs[i];
      const Seg& b = segs[j];
      if (a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v) continue;
      if (proper_crossing(a.a, a.b, b.a, b.b)) ++count;
    }
  }
  return count;
}

/// Quotient of the level edge set under the vertex -> sun map.
inline std::set<std::pair<VertexId, VertexId>> quotient_edges(
    const Graph& level, const std::unordered_map<VertexId, VertexId>& parent) {
  std::set<std::pair<VertexId, VertexId>> out;
  for (std::uint32_t i = 0; i < level.vertex_count(); ++i) {
    const VertexId u = level.id_at(i);
    for (const auto& nb : level.neighbors(i)) {
      const VertexId pu = parent.at(u);
      const VertexId pv = parent.at(nb.id);
      if (pu != pv) out.emplace(std::min(pu, pv), std::max(pu, pv));
    }
  }
  return out;
}

inline std::set<std::pair<VertexId, VertexId>> edge_set(const Graph& g) {
  std::set<std::pair<VertexId, VertexId>> out;
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    const VertexId u = g.id_at(i);
    for (const auto& nb : g.neighbors(i))
      if (u < nb.id) out.emplace(u, nb.id);
  }
  return out;
}

}  // namespace mlgd::testing
