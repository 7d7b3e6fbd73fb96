#include "mlgd/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace mlgd {

void Graph::build_index() {
  index_.reserve(ids_.size());
  for (std::uint32_t i = 0; i < ids_.size(); ++i) index_.emplace(ids_[i], i);
}

Graph Graph::build(std::span<const std::tuple<VertexId, VertexId, double>> edges,
                   std::span<const VertexId> extra_vertices) {
  std::vector<std::tuple<VertexId, VertexId, double>> norm;
  norm.reserve(edges.size());
  for (const auto& [u, v, w] : edges) {
    if (u == v) continue;  // self-loop
    norm.emplace_back(std::min(u, v), std::max(u, v), w);
  }
  std::sort(norm.begin(), norm.end());
  // Collapse parallel edges, keeping the maximum weight.
  std::vector<std::tuple<VertexId, VertexId, double>> uniq;
  uniq.reserve(norm.size());
  for (const auto& e : norm) {
    if (!uniq.empty() && std::get<0>(uniq.back()) == std::get<0>(e) &&
        std::get<1>(uniq.back()) == std::get<1>(e)) {
      std::get<2>(uniq.back()) = std::max(std::get<2>(uniq.back()), std::get<2>(e));
    } else {
      uniq.push_back(e);
    }
  }

  Graph g;
  g.ids_.reserve(uniq.size() * 2 + extra_vertices.size());
  for (const auto& [u, v, w] : uniq) {
    g.ids_.push_back(u);
    g.ids_.push_back(v);
  }
  g.ids_.insert(g.ids_.end(), extra_vertices.begin(), extra_vertices.end());
  std::sort(g.ids_.begin(), g.ids_.end());
  g.ids_.erase(std::unique(g.ids_.begin(), g.ids_.end()), g.ids_.end());
  g.build_index();

  const std::size_t n = g.ids_.size();
  std::vector<std::size_t> deg(n, 0);
  for (const auto& [u, v, w] : uniq) {
    ++deg[g.index_.at(u)];
    ++deg[g.index_.at(v)];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + deg[i];
  g.adjacency_.resize(g.offsets_[n]);

  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [u, v, w] : uniq) {
    const std::uint32_t iu = g.index_.at(u);
    const std::uint32_t iv = g.index_.at(v);
    g.adjacency_[cursor[iu]++] = Neighbor{v, iv, w};
    g.adjacency_[cursor[iv]++] = Neighbor{u, iu, w};
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.adjacency_.begin() + g.offsets_[i], g.adjacency_.begin() + g.offsets_[i + 1],
              [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
  }
  return g;
}

Graph Graph::from_edges(std::span<const std::pair<VertexId, VertexId>> edges,
                        std::span<const VertexId> extra_vertices) {
  std::vector<std::tuple<VertexId, VertexId, double>> weighted;
  weighted.reserve(edges.size());
  for (const auto& [u, v] : edges) weighted.emplace_back(u, v, 1.0);
  return build(weighted, extra_vertices);
}

std::uint32_t Graph::index_of(VertexId id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    throw std::out_of_range("vertex " + std::to_string(id) + " not in graph");
  return it->second;
}

std::optional<std::uint32_t> Graph::find(VertexId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Graph::Neighbor* Graph::find_neighbor(std::uint32_t index, VertexId target) const {
  const auto row = neighbors(index);
  auto it = std::lower_bound(row.begin(), row.end(), target,
                             [](const Neighbor& a, VertexId t) { return a.id < t; });
  if (it != row.end() && it->id == target) return &*it;
  return nullptr;
}

bool Graph::adjacent(VertexId u, VertexId v) const {
  auto iu = find(u);
  if (!iu) return false;
  return find_neighbor(*iu, v) != nullptr;
}

Graph Graph::induced(std::span<const std::uint32_t> keep) const {
  std::vector<char> in(ids_.size(), 0);
  for (auto i : keep) in[i] = 1;
  std::vector<std::tuple<VertexId, VertexId, double>> edges;
  std::vector<VertexId> vertices;
  vertices.reserve(keep.size());
  for (auto i : keep) {
    vertices.push_back(ids_[i]);
    for (const auto& nb : neighbors(i)) {
      if (in[nb.index] && ids_[i] < nb.id) edges.emplace_back(ids_[i], nb.id, nb.weight);
    }
  }
  return build(edges, vertices);
}

Vec2 Layout::at(VertexId id) const {
  auto it = pos_.find(id);
  if (it == pos_.end())
    throw std::out_of_range("no position for vertex " + std::to_string(id));
  return it->second;
}

bool Layout::covers(const Graph& g) const {
  for (VertexId id : g.ids())
    if (!pos_.count(id)) return false;
  return true;
}

std::vector<Vec2> Layout::dense(const Graph& g) const {
  std::vector<Vec2> out(g.vertex_count());
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) out[i] = at(g.id_at(i));
  return out;
}

Layout Layout::from_dense(const Graph& g, std::span<const Vec2> pos) {
  Layout l;
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) l.set(g.id_at(i), pos[i]);
  return l;
}

std::unordered_map<VertexId, std::uint32_t> PruneRecord::leaves_per_anchor() const {
  std::unordered_map<VertexId, std::uint32_t> counts;
  for (const auto& [leaf, anchor] : removed) ++counts[anchor];
  return counts;
}

namespace {

bool parse_u64(std::string_view tok, VertexId& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && p == last;
}

bool parse_f64(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && p == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

}  // namespace

Graph load_edge_list(std::istream& in) {
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks.size() != 2) throw ParseError(lineno, "expected two vertex ids");
    VertexId u, v;
    if (!parse_u64(toks[0], u) || !parse_u64(toks[1], v))
      throw ParseError(lineno, "malformed vertex id");
    edges.emplace_back(u, v);
  }
  Graph g = Graph::from_edges(edges);
  if (g.edge_count() == 0) throw EmptyGraph();
  return g;
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return load_edge_list(f);
}

void write_coords(std::ostream& out, const Graph& g, const Layout& layout) {
  char buf[96];
  for (VertexId id : g.ids()) {
    const Vec2 p = layout.at(id);
    std::snprintf(buf, sizeof(buf), "%llu %.17g %.17g\n", static_cast<unsigned long long>(id),
                  p.x, p.y);
    out << buf;
  }
}

Layout read_coords(std::istream& in) {
  Layout l;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks.size() != 3) throw ParseError(lineno, "expected: id x y");
    VertexId id;
    Vec2 p;
    if (!parse_u64(toks[0], id) || !parse_f64(toks[1], p.x) || !parse_f64(toks[2], p.y))
      throw ParseError(lineno, "malformed coordinate line");
    l.set(id, p);
  }
  return l;
}

std::vector<Graph> connected_components(const Graph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<std::uint32_t> comp(n, UINT32_MAX);
  std::vector<std::uint32_t> stack;
  std::uint32_t ncomp = 0;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (comp[s] != UINT32_MAX) continue;
    comp[s] = ncomp;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::uint32_t v = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(v)) {
        if (comp[nb.index] == UINT32_MAX) {
          comp[nb.index] = ncomp;
          stack.push_back(nb.index);
        }
      }
    }
    ++ncomp;
  }

  std::vector<std::vector<std::uint32_t>> members(ncomp);
  for (std::uint32_t i = 0; i < n; ++i) members[comp[i]].push_back(i);

  // Decreasing size; ties by smallest contained id. Members are in index
  // order, so members.front() is the smallest id of the component.
  std::vector<std::uint32_t> order(ncomp);
  for (std::uint32_t c = 0; c < ncomp; ++c) order[c] = c;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (members[a].size() != members[b].size()) return members[a].size() > members[b].size();
    return g.id_at(members[a].front()) < g.id_at(members[b].front());
  });

  std::vector<Graph> out;
  out.reserve(ncomp);
  for (std::uint32_t c : order) out.push_back(g.induced(members[c]));
  return out;
}

std::pair<Graph, PruneRecord> prune_degree_one(const Graph& g) {
  PruneRecord rec;
  std::vector<std::uint32_t> keep;
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    if (g.degree(i) == 1) {
      rec.removed.emplace_back(g.id_at(i), g.neighbors(i).front().id);
    } else {
      keep.push_back(i);
    }
  }
  if (keep.empty()) throw CoreEmpty();
  return {g.induced(keep), std::move(rec)};
}

namespace {
constexpr double kTwoPi = 6.283185307179586;
}

Layout reinsert(const Layout& layout, const PruneRecord& rec, const Graph& g_original) {
  Layout out = layout;
  if (rec.empty()) return out;

  // Group leaves per anchor, ascending anchor then leaf id.
  std::map<VertexId, std::vector<VertexId>> by_anchor;
  for (const auto& [leaf, anchor] : rec.removed) by_anchor[anchor].push_back(leaf);

  for (auto& [anchor, leaves] : by_anchor) {
    std::sort(leaves.begin(), leaves.end());
    const Vec2 c = layout.at(anchor);

    // Directions and distances of the anchor's already-drawn incident edges.
    std::vector<double> angles;
    double nearest = -1.0;
    for (const auto& nb : g_original.neighbors_of(anchor)) {
      if (!layout.contains(nb.id)) continue;
      const Vec2 d = layout.at(nb.id) - c;
      const double len = d.norm();
      if (len <= 0.0) continue;
      if (nearest < 0.0 || len < nearest) nearest = len;
      angles.push_back(std::atan2(d.y, d.x));
    }
    // Isolated core vertex (e.g. a star center): unit radius, full circle.
    const double radius = nearest > 0.0 ? 0.25 * nearest : 1.0;

    double gap_start = 0.0;
    double gap_size = kTwoPi;
    if (!angles.empty()) {
      std::sort(angles.begin(), angles.end());
      gap_size = 0.0;
      for (std::size_t i = 0; i < angles.size(); ++i) {
        const double a = angles[i];
        const double b = i + 1 < angles.size() ? angles[i + 1] : angles.front() + kTwoPi;
        if (b - a > gap_size) {
          gap_size = b - a;
          gap_start = a;
        }
      }
    }

    const std::size_t k = leaves.size();
    for (std::size_t i = 0; i < k; ++i) {
      const double a = gap_start + gap_size * static_cast<double>(i + 1) / static_cast<double>(k + 1);
      out.set(leaves[i], c + Vec2{std::cos(a), std::sin(a)} * radius);
    }
  }
  return out;
}

}  // namespace mlgd
