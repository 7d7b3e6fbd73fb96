#pragma once

// Deterministic graph generators for tests and the acceptance corpus.

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "mlgd/graph.hpp"
#include "mlgd/types.hpp"

namespace mlgd::testing {

using Edge = std::pair<VertexId, VertexId>;

inline Graph from(const std::vector<Edge>& edges) { return Graph::from_edges(edges); }

inline Graph grid(std::size_t w, std::size_t h) {
  std::vector<Edge> edges;
  auto id = [&](std::size_t r, std::size_t c) { return static_cast<VertexId>(r * w + c + 1); };
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (c + 1 < w) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < h) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  }
  return from(edges);
}

inline Graph path(std::size_t n) {
  std::vector<Edge> edges;
  for (VertexId i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
  return from(edges);
}

inline Graph cycle(std::size_t n) {
  std::vector<Edge> edges;
  for (VertexId i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(static_cast<VertexId>(n), 1);
  return from(edges);
}

inline Graph complete(std::size_t n) {
  std::vector<Edge> edges;
  for (VertexId i = 1; i <= n; ++i)
    for (VertexId j = i + 1; j <= n; ++j) edges.emplace_back(i, j);
  return from(edges);
}

inline Graph star(std::size_t leaves) {
  std::vector<Edge> edges;
  for (VertexId i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return from(edges);
}

/// Random recursive tree capped at `max_depth`: each vertex picks a uniform
/// parent among existing vertices of depth < max_depth.
inline Graph random_tree(std::size_t n, std::size_t max_depth, std::uint64_t seed) {
  std::vector<Edge> edges;
  std::vector<std::size_t> depth{0};
  std::vector<VertexId> eligible{1};
  SplitMix64 rng(mix64(seed, n, max_depth));
  for (VertexId v = 2; v <= n; ++v) {
    const VertexId parent = eligible[rng.next_below(eligible.size())];
    edges.emplace_back(parent, v);
    const std::size_t d = depth[parent - 1] + 1;
    depth.push_back(d);
    if (d < max_depth) eligible.push_back(v);
  }
  return from(edges);
}

/// Sierpinski triangle graph of the given depth: depth 0 is a triangle, each
/// deeper level splits every edge and removes the center.
inline Graph sierpinski(std::size_t depth) {
  // Represent triangles by their corner ids and subdivide recursively.
  std::vector<Edge> edges;
  VertexId next_id = 4;
  struct Tri {
    VertexId a, b, c;
    std::size_t d;
  };
  std::vector<Tri> work{{1, 2, 3, 0}};
  std::map<std::pair<VertexId, VertexId>, VertexId> midpoints;
  auto midpoint = [&](VertexId u, VertexId v) {
    const auto [it, fresh] = midpoints.try_emplace(std::minmax(u, v), next_id);
    if (fresh) ++next_id;
    return it->second;
  };
  while (!work.empty()) {
    const Tri t = work.back();
    work.pop_back();
    if (t.d == depth) {
      edges.emplace_back(t.a, t.b);
      edges.emplace_back(t.b, t.c);
      edges.emplace_back(t.a, t.c);
      continue;
    }
    const VertexId ab = midpoint(t.a, t.b);
    const VertexId bc = midpoint(t.b, t.c);
    const VertexId ac = midpoint(t.a, t.c);
    work.push_back({t.a, ab, ac, t.d + 1});
    work.push_back({ab, t.b, bc, t.d + 1});
    work.push_back({ac, bc, t.c, t.d + 1});
  }
  return from(edges);
}

/// Connected random graph: random spanning tree plus `extra` random edges.
inline Graph random_connected(std::size_t n, std::size_t extra, std::uint64_t seed) {
  SplitMix64 rng(mix64(seed, n, extra));
  std::vector<Edge> edges;
  for (VertexId v = 2; v <= n; ++v)
    edges.emplace_back(1 + rng.next_below(v - 1), v);
  for (std::size_t e = 0; e < extra; ++e) {
    const VertexId u = 1 + rng.next_below(n);
    const VertexId v = 1 + rng.next_below(n);
    if (u != v) edges.emplace_back(u, v);
  }
  return from(edges);
}

/// Zachary's karate club: 34 vertices, 78 edges.
inline Graph karate_club() {
  static const std::vector<Edge> edges = {
      {1, 2},   {1, 3},   {1, 4},   {1, 5},   {1, 6},   {1, 7},   {1, 8},   {1, 9},
      {1, 11},  {1, 12},  {1, 13},  {1, 14},  {1, 18},  {1, 20},  {1, 22},  {1, 32},
      {2, 3},   {2, 4},   {2, 8},   {2, 14},  {2, 18},  {2, 20},  {2, 22},  {2, 31},
      {3, 4},   {3, 8},   {3, 9},   {3, 10},  {3, 14},  {3, 28},  {3, 29},  {3, 33},
      {4, 8},   {4, 13},  {4, 14},  {5, 7},   {5, 11},  {6, 7},   {6, 11},  {6, 17},
      {7, 17},  {9, 31},  {9, 33},  {9, 34},  {10, 34}, {14, 34}, {15, 33}, {15, 34},
      {16, 33}, {16, 34}, {19, 33}, {19, 34}, {20, 34}, {21, 33}, {21, 34}, {23, 33},
      {23, 34}, {24, 26}, {24, 28}, {24, 30}, {24, 33}, {24, 34}, {25, 26}, {25, 28},
      {25, 32}, {26, 32}, {27, 30}, {27, 34}, {28, 34}, {29, 32}, {29, 34}, {30, 33},
      {30, 34}, {31, 33}, {31, 34}, {32, 33}, {32, 34}, {33, 34}};
  return from(edges);
}

}  // namespace mlgd::testing
