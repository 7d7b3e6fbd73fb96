#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlgd/graph.hpp"
#include "mlgd/runner.hpp"

namespace mlgd {

struct LayoutParams {
  /// Repulsion horizon: vertices within graph distance k repel. 0 means pick
  /// from the edge-count schedule (choose_k).
  int k = 0;
  double ideal_length = 1.0;
  double repulsion_constant = 1.0;
  double initial_max_displacement = 1.0;
  double cooling_exponent = 1.0;
  /// Full k-hop refloods happen every reflood_period iterations; in between,
  /// only direct neighbors' positions refresh (speed over accuracy).
  int reflood_period = 1;
  /// Heavier coarse vertices repel more (mass / level mean); off reverts to
  /// plain Fruchterman-Reingold.
  bool mass_repulsion = true;
};

/// Repulsion horizon as a function of the level's edge count: 6 below 10^3
/// edges, then 5, 4, 3, 2, and 1 from 10^6 edges up.
int choose_k(std::int64_t edge_count);

struct NeighborEntry {
  VertexId id;
  Vec2 position;
  std::uint16_t hop;
  double mass;
};

/// Everything within hop distance 1..k of a vertex, sorted by id.
using NeighborhoodView = std::vector<NeighborEntry>;

/// k rounds of controlled position flooding; the result per vertex is exactly
/// its depth-k BFS neighborhood with minimal hop distances.
std::vector<NeighborhoodView> flood_neighborhoods(const Graph& g, const Layout& layout,
                                                  std::span<const double> masses, int k,
                                                  PhaseRunner& runner);

/// Force-accumulation pieces, exposed for property tests.
/// Repulsion on `at` exerted by `from` (points away from `from`); coincident
/// points separate along a seeded direction that is antisymmetric in the pair.
Vec2 repulsion_between(Vec2 at, Vec2 from, double mass_factor, const LayoutParams& p,
                       VertexId at_id, VertexId from_id, std::uint64_t seed);
/// Attraction on `at` toward an adjacent vertex; desired length is
/// ideal_length * max(weight, 2) / 2, so plain edges sit at ideal_length and
/// heavier coarse edges stretch proportionally.
Vec2 attraction_along(Vec2 at, Vec2 toward, double edge_weight, const LayoutParams& p);
/// Displacement cap at iteration t of T: initial * (1 - t/T)^cooling.
double max_displacement(const LayoutParams& p, int iteration, int iterations);

/// One synchronous force step over the given views (pure; the BSP layout run
/// applies the same kernel).
Layout step_forces(const Graph& g, const Layout& layout,
                   const std::vector<NeighborhoodView>& views, std::span<const double> masses,
                   const LayoutParams& params, int iteration, int iterations,
                   std::uint64_t seed);

struct SingleLevelConfig {
  LayoutParams params;
  int coarsest_iterations = 300;
  int refine_iterations = 50;
};

/// Runs the single-level force-directed refinement: k from the schedule (or
/// params.k), coarsest_iterations iterations on the top level and
/// refine_iterations otherwise, reflooding per params.reflood_period.
Layout run_single_level(const Graph& g, const Layout& initial, std::span<const double> masses,
                        bool coarsest, const SingleLevelConfig& cfg, PhaseRunner& runner);

}  // namespace mlgd
