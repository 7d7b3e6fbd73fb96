#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlgd/graph.hpp"

namespace mlgd {

class DegenerateDrawing : public std::runtime_error {
 public:
  DegenerateDrawing() : std::runtime_error("drawing has zero mean edge length") {}
};

class UnsupportedFormat : public std::runtime_error {
 public:
  explicit UnsupportedFormat(const std::string& f)
      : std::runtime_error("unsupported export format: " + f) {}
};

struct QualityReport {
  double cre = 0.0;   // 2 * crossings / edges: each crossing charges both edges
  double neld = 0.0;  // population stddev of edge lengths / mean edge length
  std::int64_t crossings_total = 0;
  std::int64_t edge_count = 0;
  double mean_edge_length = 0.0;
};

/// Deterministic general-position jitter keyed to vertex ids, applied before
/// crossing counting so degenerate inputs (coincident points, collinear
/// triples) resolve the same way everywhere. Exposed so the brute-force
/// oracle sees exactly the same coordinates as the sweep.
Layout perturb_for_crossings(const Graph& g, const Layout& l);

/// Strict segment crossing: open segments intersect in exactly one interior
/// point.
bool proper_crossing(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// Number of unordered edge pairs whose open segments properly cross; pairs
/// sharing an endpoint never count. Plane sweep over x with a y-interval
/// filter.
std::int64_t count_crossings(const Graph& g, const Layout& l);

/// Population standard deviation of edge lengths divided by their mean.
double neld(const Graph& g, const Layout& l);

QualityReport quality_report(const Graph& g, const Layout& l);

struct ComponentDrawing {
  const Graph* graph;
  const Layout* layout;
};

/// Translates each component into a cell of a near-square matrix, ordered by
/// decreasing vertex count (ties by smallest id). Cells are uniform: largest
/// bounding box plus a 10% margin per side. Internal geometry is preserved
/// exactly; a single component is merely anchored at the origin.
Layout arrange_components(std::span<const ComponentDrawing> parts);

void export_svg(std::ostream& out, const Graph& g, const Layout& l);

struct ReportData {
  QualityReport quality;
  std::int64_t supersteps = 0;
  std::int64_t messages = 0;
  /// Hierarchy level sizes, one list per connected component.
  std::vector<std::vector<std::size_t>> level_sizes;
};

std::string report_json(const ReportData& r);

enum class ExportFormat { svg, coords, json_report };

/// svg: line per edge, circle per vertex, fitted viewBox with 5% padding.
/// coords: "id x y" lines sorted by id. json-report: quality + run stats +
/// hierarchy summary (requires `report`).
void export_drawing(std::ostream& out, ExportFormat format, const Graph& g, const Layout& l,
                    const ReportData* report = nullptr);

}  // namespace mlgd
