#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "mlgd/graph.hpp"
#include "mlgd/messages.hpp"
#include "mlgd/runner.hpp"

namespace mlgd {

enum class VertexState : std::uint8_t { unassigned, sun, planet, moon };

/// Per-vertex protocol state of the coarsening hierarchy.
struct VertexAttrs {
  VertexId id = 0;
  std::uint32_t level = 0;
  double mass = 1.0;
  VertexState state = VertexState::unassigned;
  /// Planets and moons: the sun of their solar system.
  std::optional<VertexId> system_sun;
  /// Suns: confirmed planets, sorted.
  std::vector<VertexId> planet_list;
  /// Moons: adjacent same-system planets that forwarded the accepted offer,
  /// sorted. The smallest one is the moon's relay for two-hop traffic.
  std::vector<VertexId> system_planets;

  VertexId relay() const { return system_planets.front(); }
};

/// Sun-to-sun paths per system pair. Paths are stored from the keyed sun's
/// perspective (path.front() == sun); the reversed path appears in the
/// neighbor sun's table.
struct InterLinkTable {
  std::map<VertexId, std::map<VertexId, std::vector<LinkPath>>> by_sun;

  const std::vector<LinkPath>* paths(VertexId sun, VertexId other) const {
    auto it = by_sun.find(sun);
    if (it == by_sun.end()) return nullptr;
    auto jt = it->second.find(other);
    return jt == it->second.end() ? nullptr : &jt->second;
  }
};

struct HierarchyLevel {
  Graph graph;
  std::vector<VertexAttrs> attrs;  // by dense index of `graph`
  InterLinkTable links;            // discovered while coarsening this level
};

struct Hierarchy {
  std::vector<HierarchyLevel> levels;
  /// parent[i] maps every level-i vertex to its sun's image in level i+1
  /// (image vertices keep the sun's id). Size = levels.size() - 1.
  std::vector<std::unordered_map<VertexId, VertexId>> parent;

  std::size_t depth() const { return levels.size(); }
};

/// Working state of one level's coarsening run: the public attrs plus the
/// sun-side accumulators the protocol fills in.
struct MergerState {
  VertexAttrs attrs;
  bool fresh = false;  // candidate / not-yet-grown sun in the current pass
  double system_mass = 0.0;
  std::vector<std::pair<VertexId, VertexId>> moon_members;  // (moon, relay)
  std::map<VertexId, std::vector<LinkPath>> links;          // suns: per neighbor sun
};

struct MergerConfig {
  double sun_probability = 0.2;
  std::size_t coarsen_threshold = 30;
};

std::vector<MergerState> make_initial_states(
    const Graph& g, std::uint32_t level,
    const std::unordered_map<VertexId, std::uint32_t>* leaf_counts = nullptr);

/// One election pass (4 supersteps): every unassigned vertex turns candidate
/// with probability p, candidates broadcast their id, and of any two
/// candidates within graph distance 2 the lower id is demoted back to
/// unassigned. Returns the surviving fresh suns, sorted.
std::vector<VertexId> elect_suns(const Graph& level, std::vector<MergerState>& states, double p,
                                 PhaseRunner& runner);

/// The demotion rounds only, for pre-seeded candidates (states already sun +
/// fresh). elect_suns is self-election followed by this.
std::vector<VertexId> resolve_sun_conflicts(const Graph& level,
                                            std::vector<MergerState>& states,
                                            PhaseRunner& runner);

/// One growth pass (5 supersteps): fresh suns broadcast offers, unassigned
/// receivers become planets (direct) or moons of the greatest-id offering sun
/// (forwarded), confirmations flow back, and conflicting offers seed the
/// inter-link tables of both suns involved. Returns the number of vertices
/// assigned (fresh suns count as assigned).
std::size_t grow_systems(const Graph& level, std::vector<MergerState>& states,
                         PhaseRunner& runner);

/// Inter-system link generation (4 supersteps): every vertex broadcasts its
/// route to its sun; receivers in a different system report the witnessed
/// sun-to-sun path to their own sun. Every cross-system edge ends up as at
/// least one path in both suns' tables.
void discover_links(const Graph& level, std::vector<MergerState>& states, PhaseRunner& runner);

struct NextLevel {
  Graph graph;
  std::vector<MergerState> states;
  std::unordered_map<VertexId, VertexId> parent;
};

/// Collapses every solar system into its sun: one coarse vertex per sun
/// (keeping the sun's id, level + 1, mass = system mass sum), one coarse edge
/// per linked system pair, weighted by the longest witnessed path's vertex
/// count.
NextLevel build_next_level(const Graph& level, const std::vector<MergerState>& states);

InterLinkTable extract_links(const std::vector<MergerState>& states);
std::vector<VertexAttrs> extract_attrs(const std::vector<MergerState>& states);

/// Repeats elect/grow until no vertex is unassigned (force-promoting the
/// minimum-id unassigned vertex if an election pass comes up empty), then
/// runs link discovery. Mutates `states` to the final assignment.
void coarsen_level(const Graph& level, std::vector<MergerState>& states, double sun_probability,
                   PhaseRunner& runner);

/// Full coarsening: iterates coarsen_level + build_next_level until the
/// current level has fewer than cfg.coarsen_threshold vertices (or one
/// vertex). Level-0 masses are 1 + the vertex's pruned-leaf count.
Hierarchy build_hierarchy(const Graph& component,
                          const std::unordered_map<VertexId, std::uint32_t>& leaf_counts,
                          const MergerConfig& cfg, PhaseRunner& runner);

}  // namespace mlgd
