#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mlgd/types.hpp"

namespace mlgd {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("parse error at line " + std::to_string(line) + ": " + what),
        line(line) {}
  std::size_t line;
};

class EmptyGraph : public std::runtime_error {
 public:
  EmptyGraph() : std::runtime_error("edge list contains no usable edges") {}
};

class CoreEmpty : public std::runtime_error {
 public:
  CoreEmpty() : std::runtime_error("degree-one pruning would delete every vertex") {}
};

/// Immutable undirected graph in CSR form. Vertices keep their external
/// 64-bit ids; neighbor rows are sorted by id and carry the dense index of
/// the neighbor so hot paths never touch the id->index hash map.
///
/// Invariants: symmetric adjacency with equal weights both ways, no
/// self-loops, no parallel edges.
class Graph {
 public:
  struct Neighbor {
    VertexId id;
    std::uint32_t index;
    double weight;
  };

  Graph() = default;

  /// Builds a normalized graph: self-loops dropped, parallel edges collapsed
  /// (keeping the maximum weight), symmetry enforced. `extra_vertices` adds
  /// isolated vertices not mentioned by any edge.
  static Graph build(std::span<const std::tuple<VertexId, VertexId, double>> edges,
                     std::span<const VertexId> extra_vertices = {});
  static Graph from_edges(std::span<const std::pair<VertexId, VertexId>> edges,
                          std::span<const VertexId> extra_vertices = {});

  std::size_t vertex_count() const { return ids_.size(); }
  std::size_t edge_count() const { return adjacency_.size() / 2; }
  bool empty() const { return ids_.empty(); }

  std::span<const VertexId> ids() const { return ids_; }
  VertexId id_at(std::uint32_t index) const { return ids_[index]; }

  bool has_vertex(VertexId id) const { return index_.count(id) != 0; }
  std::uint32_t index_of(VertexId id) const;
  std::optional<std::uint32_t> find(VertexId id) const;

  std::span<const Neighbor> neighbors(std::uint32_t index) const {
    return {adjacency_.data() + offsets_[index], offsets_[index + 1] - offsets_[index]};
  }
  std::span<const Neighbor> neighbors_of(VertexId id) const { return neighbors(index_of(id)); }

  std::size_t degree(std::uint32_t index) const { return offsets_[index + 1] - offsets_[index]; }

  /// Binary search in the sorted neighbor row.
  const Neighbor* find_neighbor(std::uint32_t index, VertexId target) const;
  bool adjacent(VertexId u, VertexId v) const;

  /// Induced subgraph on `keep` (dense indices into this graph).
  Graph induced(std::span<const std::uint32_t> keep) const;

 private:
  std::vector<VertexId> ids_;               // sorted
  std::vector<std::size_t> offsets_;        // size n+1
  std::vector<Neighbor> adjacency_;         // rows sorted by id
  std::unordered_map<VertexId, std::uint32_t> index_;

  void build_index();
};

/// Per-level drawing: vertex id -> 2-D position in abstract layout units.
class Layout {
 public:
  Layout() = default;

  void set(VertexId id, Vec2 p) { pos_[id] = p; }
  bool contains(VertexId id) const { return pos_.count(id) != 0; }
  Vec2 at(VertexId id) const;
  std::size_t size() const { return pos_.size(); }
  bool covers(const Graph& g) const;

  const std::unordered_map<VertexId, Vec2>& positions() const { return pos_; }

  /// Positions by dense index of `g`; throws if not total over g.
  std::vector<Vec2> dense(const Graph& g) const;
  static Layout from_dense(const Graph& g, std::span<const Vec2> pos);

 private:
  std::unordered_map<VertexId, Vec2> pos_;
};

/// Result of degree-one pruning; order of `removed` follows ascending leaf id.
struct PruneRecord {
  std::vector<std::pair<VertexId, VertexId>> removed;  // (leaf, anchor)

  bool empty() const { return removed.empty(); }
  /// Leaves per anchor, for mass initialization (1 + count).
  std::unordered_map<VertexId, std::uint32_t> leaves_per_anchor() const;
};

/// Parses whitespace-separated "u v" pairs; '#' starts a comment line.
Graph load_edge_list(std::istream& in);
Graph load_edge_list_file(const std::string& path);

/// "id x y" per line, sorted by id, with round-trip-exact doubles.
void write_coords(std::ostream& out, const Graph& g, const Layout& layout);
Layout read_coords(std::istream& in);

/// Maximal connected subgraphs, ordered by decreasing vertex count, ties by
/// smallest contained vertex id.
std::vector<Graph> connected_components(const Graph& g);

/// Removes every vertex of degree one in a single simultaneous pass.
/// Throws CoreEmpty if nothing would remain (the caller then skips pruning).
std::pair<Graph, PruneRecord> prune_degree_one(const Graph& g);

/// Places pruned leaves back around their anchors: each leaf sits on a circle
/// of radius 0.25 * (anchor's nearest positioned neighbor distance), fanned at
/// equal angles inside the anchor's widest angular gap.
Layout reinsert(const Layout& layout, const PruneRecord& rec, const Graph& g_original);

}  // namespace mlgd
