#include "mlgd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>

namespace mlgd {

namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

struct BBox {
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();

  void add(Vec2 p) {
    xmin = std::min(xmin, p.x);
    ymin = std::min(ymin, p.y);
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
  }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool valid() const { return xmin <= xmax; }
};

BBox bbox_of(const Graph& g, const Layout& l) {
  BBox b;
  for (VertexId id : g.ids()) b.add(l.at(id));
  return b;
}

}  // namespace

bool proper_crossing(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) &&
         ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

Layout perturb_for_crossings(const Graph& g, const Layout& l) {
  const BBox b = bbox_of(g, l);
  double scale = 1e-9 * std::max(b.width(), b.height());
  if (!(scale > 0.0)) scale = 1e-9;
  Layout out;
  for (VertexId id : g.ids()) {
    SplitMix64 r(mix64(0x9e0c0ffeeULL, id));
    const Vec2 p = l.at(id);
    out.set(id, {p.x + r.next_in(-scale, scale), p.y + r.next_in(-scale, scale)});
  }
  return out;
}

std::int64_t count_crossings(const Graph& g, const Layout& l) {
  struct Seg {
    Vec2 a, b;
    VertexId u, v;
    double xmin, xmax, ymin, ymax;
  };

  const Layout pl = perturb_for_crossings(g, l);
  std::vector<Seg> segs;
  segs.reserve(g.edge_count());
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    const VertexId u = g.id_at(i);
    for (const auto& nb : g.neighbors(i)) {
      if (u >= nb.id) continue;
      Seg s;
      s.a = pl.at(u);
      s.b = pl.at(nb.id);
      s.u = u;
      s.v = nb.id;
      s.xmin = std::min(s.a.x, s.b.x);
      s.xmax = std::max(s.a.x, s.b.x);
      s.ymin = std::min(s.a.y, s.b.y);
      s.ymax = std::max(s.a.y, s.b.y);
      segs.push_back(s);
    }
  }
  std::sort(segs.begin(), segs.end(),
            [](const Seg& a, const Seg& b) { return a.xmin < b.xmin; });

  std::int64_t count = 0;
  std::vector<std::uint32_t> active;
  for (std::uint32_t si = 0; si < segs.size(); ++si) {
    const Seg& s = segs[si];
    std::size_t keep = 0;
    for (std::size_t j = 0; j < active.size(); ++j) {
      const Seg& a = segs[active[j]];
      if (a.xmax < s.xmin) continue;  // left the sweep for good
      active[keep++] = active[j];
      if (a.ymin > s.ymax || a.ymax < s.ymin) continue;
      if (a.u == s.u || a.u == s.v || a.v == s.u || a.v == s.v) continue;
      if (proper_crossing(a.a, a.b, s.a, s.b)) ++count;
    }
    active.resize(keep);
    active.push_back(si);
  }
  return count;
}

double neld(const Graph& g, const Layout& l) {
  if (g.edge_count() == 0) throw std::invalid_argument("neld: graph has no edges");
  double sum = 0.0, sq = 0.0;
  const double m = static_cast<double>(g.edge_count());
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    const VertexId u = g.id_at(i);
    for (const auto& nb : g.neighbors(i)) {
      if (u >= nb.id) continue;
      const double len = distance(l.at(u), l.at(nb.id));
      sum += len;
      sq += len * len;
    }
  }
  const double mean = sum / m;
  if (mean <= 0.0) throw DegenerateDrawing();
  const double var = std::max(0.0, sq / m - mean * mean);
  return std::sqrt(var) / mean;
}

QualityReport quality_report(const Graph& g, const Layout& l) {
  QualityReport r;
  r.edge_count = static_cast<std::int64_t>(g.edge_count());
  if (r.edge_count == 0) return r;
  r.crossings_total = count_crossings(g, l);
  r.cre = 2.0 * static_cast<double>(r.crossings_total) / static_cast<double>(r.edge_count);
  double sum = 0.0;
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    const VertexId u = g.id_at(i);
    for (const auto& nb : g.neighbors(i))
      if (u < nb.id) sum += distance(l.at(u), l.at(nb.id));
  }
  r.mean_edge_length = sum / static_cast<double>(r.edge_count);
  r.neld = neld(g, l);
  return r;
}

Layout arrange_components(std::span<const ComponentDrawing> parts) {
  Layout out;
  if (parts.empty()) return out;

  if (parts.size() == 1) {
    const auto& [g, l] = parts.front();
    const BBox b = bbox_of(*g, *l);
    for (VertexId id : g->ids()) {
      const Vec2 p = l->at(id);
      out.set(id, {p.x - b.xmin, p.y - b.ymin});
    }
    return out;
  }

  std::vector<std::uint32_t> order(parts.size());
  for (std::uint32_t i = 0; i < parts.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const std::size_t na = parts[a].graph->vertex_count();
    const std::size_t nb = parts[b].graph->vertex_count();
    if (na != nb) return na > nb;
    return parts[a].graph->ids().front() < parts[b].graph->ids().front();
  });

  std::vector<BBox> boxes(parts.size());
  double max_w = 0.0, max_h = 0.0;
  for (std::uint32_t i = 0; i < parts.size(); ++i) {
    boxes[i] = bbox_of(*parts[i].graph, *parts[i].layout);
    max_w = std::max(max_w, boxes[i].width());
    max_h = std::max(max_h, boxes[i].height());
  }
  // Uniform cells: largest box plus a 10% margin per side; a floor keeps
  // degenerate (point) components apart.
  const double cell_w = std::max(1.2 * max_w, 1.0);
  const double cell_h = std::max(1.2 * max_h, 1.0);

  const std::size_t cols =
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(parts.size()))));
  for (std::uint32_t slot = 0; slot < order.size(); ++slot) {
    const std::uint32_t ci = order[slot];
    const std::size_t row = slot / cols;
    const std::size_t col = slot % cols;
    const Vec2 center{(static_cast<double>(col) + 0.5) * cell_w,
                      (static_cast<double>(row) + 0.5) * cell_h};
    const Vec2 bc{(boxes[ci].xmin + boxes[ci].xmax) / 2.0,
                  (boxes[ci].ymin + boxes[ci].ymax) / 2.0};
    const Vec2 shift = center - bc;
    for (VertexId id : parts[ci].graph->ids()) out.set(id, parts[ci].layout->at(id) + shift);
  }
  return out;
}

void export_svg(std::ostream& out, const Graph& g, const Layout& l) {
  BBox b = bbox_of(g, l);
  if (!b.valid()) b = BBox{0, 0, 1, 1};
  double dim = std::max(b.width(), b.height());
  if (dim <= 0.0) dim = 2.0;
  const double pad = 0.05 * dim;
  const double r = dim / 200.0;
  const double stroke = dim / 400.0;

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.6g %.6g %.6g %.6g\">\n",
                b.xmin - pad, b.ymin - pad, b.width() + 2 * pad, b.height() + 2 * pad);
  out << buf;
  out << "<g stroke=\"#444\" stroke-width=\"" << stroke << "\" stroke-opacity=\"0.7\">\n";
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    const VertexId u = g.id_at(i);
    const Vec2 pu = l.at(u);
    for (const auto& nb : g.neighbors(i)) {
      if (u >= nb.id) continue;
      const Vec2 pv = l.at(nb.id);
      std::snprintf(buf, sizeof(buf),
                    "<line x1=\"%.6g\" y1=\"%.6g\" x2=\"%.6g\" y2=\"%.6g\"/>\n", pu.x, pu.y,
                    pv.x, pv.y);
      out << buf;
    }
  }
  out << "</g>\n<g fill=\"#1f77b4\">\n";
  for (VertexId id : g.ids()) {
    const Vec2 p = l.at(id);
    std::snprintf(buf, sizeof(buf), "<circle cx=\"%.6g\" cy=\"%.6g\" r=\"%.6g\"/>\n", p.x, p.y,
                  r);
    out << buf;
  }
  out << "</g>\n</svg>\n";
}

std::string report_json(const ReportData& r) {
  nlohmann::json j;
  j["cre"] = r.quality.cre;
  j["neld"] = r.quality.neld;
  j["crossings"] = r.quality.crossings_total;
  j["edge_count"] = r.quality.edge_count;
  j["mean_edge_length"] = r.quality.mean_edge_length;
  j["levels"] = r.level_sizes;
  j["supersteps"] = r.supersteps;
  j["messages"] = r.messages;
  return j.dump(2);
}

void export_drawing(std::ostream& out, ExportFormat format, const Graph& g, const Layout& l,
                    const ReportData* report) {
  switch (format) {
    case ExportFormat::svg:
      export_svg(out, g, l);
      return;
    case ExportFormat::coords:
      write_coords(out, g, l);
      return;
    case ExportFormat::json_report:
      if (report == nullptr)
        throw std::invalid_argument("json-report export needs run data");
      out << report_json(*report) << "\n";
      return;
  }
  throw UnsupportedFormat("unknown");
}

}  // namespace mlgd
