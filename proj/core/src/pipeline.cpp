#include "mlgd/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "mlgd/partition.hpp"
#include "mlgd/solar_merger.hpp"
#include "mlgd/solar_placer.hpp"

namespace mlgd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> level_masses(const HierarchyLevel& level) {
  std::vector<double> m(level.attrs.size());
  for (std::size_t i = 0; i < level.attrs.size(); ++i) m[i] = level.attrs[i].mass;
  return m;
}

Layout random_square_layout(const Graph& g, double side, std::uint64_t seed) {
  Layout l;
  for (VertexId id : g.ids()) {
    SplitMix64 r(mix64(seed, id, 0x5c7a2e));
    l.set(id, {r.next_in(0.0, side), r.next_in(0.0, side)});
  }
  return l;
}

void dump_level(const std::string& dir, std::size_t comp, std::size_t lvl,
                const HierarchyLevel& level, const Layout& layout) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string stem =
      dir + "/comp" + std::to_string(comp) + "_level" + std::to_string(lvl);

  std::ofstream dot(stem + ".dot");
  dot << "graph level" << lvl << " {\n";
  for (std::uint32_t i = 0; i < level.graph.vertex_count(); ++i) {
    dot << "  " << level.graph.id_at(i) << " [mass=" << level.attrs[i].mass << "];\n";
  }
  for (std::uint32_t i = 0; i < level.graph.vertex_count(); ++i) {
    const VertexId u = level.graph.id_at(i);
    for (const auto& nb : level.graph.neighbors(i))
      if (u < nb.id) dot << "  " << u << " -- " << nb.id << " [weight=" << nb.weight << "];\n";
  }
  dot << "}\n";

  std::ofstream coords(stem + ".coords");
  write_coords(coords, level.graph, layout);
}

struct PrunedComponent {
  Graph core;
  std::vector<PruneRecord> records;  // in prune order
  std::unordered_map<VertexId, std::uint32_t> leaf_counts;
};

PrunedComponent prune_component(const Graph& comp, int iterations) {
  PrunedComponent out;
  out.core = comp;
  std::unordered_map<VertexId, std::uint32_t> carried;  // vertex -> pruned weight below it
  for (int it = 0; it < iterations; ++it) {
    if (out.core.vertex_count() < 3) break;
    try {
      auto [next, rec] = prune_degree_one(out.core);
      if (rec.empty()) break;
      for (const auto& [leaf, anchor] : rec.removed) {
        const std::uint32_t w = 1 + carried[leaf];
        carried[anchor] += w;
      }
      out.core = std::move(next);
      out.records.push_back(std::move(rec));
    } catch (const CoreEmpty&) {
      break;  // pruning would delete everything; keep the component as is
    }
  }
  for (VertexId id : out.core.ids()) {
    auto it = carried.find(id);
    if (it != carried.end()) out.leaf_counts.emplace(id, it->second);
  }
  return out;
}

}  // namespace

PipelineResult run_pipeline_on(const Graph& g, const PipelineConfig& cfg) {
  if (cfg.workers < 1) throw std::invalid_argument("pipeline: workers must be >= 1");
  const auto t0 = Clock::now();
  auto log = [&](int level, const std::string& msg) {
    if (cfg.verbosity >= level)
      std::cerr << "[mlgd " << seconds_since(t0) << "s] " << msg << "\n";
  };

  PhaseRunner runner(cfg.workers, cfg.seed);
  runner.shuffle_inboxes = cfg.shuffle_inboxes;
  runner.partitioner = [&cfg](const Graph& lg) {
    PartitionConfig pc;
    pc.parts = cfg.partitions > 0 ? cfg.partitions : cfg.workers;
    pc.epsilon = cfg.balance_epsilon;
    pc.rounds = cfg.partition_rounds;
    pc.seed = mix64(cfg.seed, lg.vertex_count(), lg.edge_count());
    PartitionMap pm = partition(lg, pc);
    std::unordered_map<VertexId, int> workers;
    workers.reserve(pm.assignment.size());
    for (const auto& [v, p] : pm.assignment) workers.emplace(v, p % cfg.workers);
    return workers;
  };

  SingleLevelConfig slc;
  slc.params = cfg.layout;
  slc.coarsest_iterations = cfg.coarsest_iterations;
  slc.refine_iterations = cfg.refine_iterations;

  MergerConfig mc;
  mc.sun_probability = cfg.sun_probability;
  mc.coarsen_threshold = cfg.coarsen_threshold;

  const auto comps = connected_components(g);
  log(1, "components: " + std::to_string(comps.size()));

  PipelineResult result;
  std::vector<Layout> comp_layouts(comps.size());
  std::vector<ComponentDrawing> drawings;

  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    const Graph& comp = comps[ci];
    PrunedComponent pruned = prune_component(comp, cfg.prune_iterations);
    log(1, "component " + std::to_string(ci) + ": n=" + std::to_string(comp.vertex_count()) +
               " core=" + std::to_string(pruned.core.vertex_count()));

    Hierarchy h = build_hierarchy(pruned.core, pruned.leaf_counts, mc, runner);
    std::vector<std::size_t> sizes;
    for (const auto& lvl : h.levels) sizes.push_back(lvl.graph.vertex_count());
    result.level_sizes.push_back(sizes);
    log(1, "component " + std::to_string(ci) + ": " + std::to_string(h.depth()) + " levels");

    // Coarsest level: force layout from a random placement whose density is
    // level-independent (unit square scaled by sqrt(n) * ideal length).
    const std::size_t top = h.depth() - 1;
    const Graph& top_graph = h.levels[top].graph;
    const double side =
        std::sqrt(static_cast<double>(top_graph.vertex_count())) * cfg.layout.ideal_length;
    Layout layout = random_square_layout(top_graph, side, mix64(cfg.seed, ci, 0xC0A25));
    layout = run_single_level(top_graph, layout, level_masses(h.levels[top]), true, slc, runner);
    if (!cfg.dump_levels_dir.empty())
      dump_level(cfg.dump_levels_dir, ci, top, h.levels[top], layout);

    for (std::size_t li = top; li-- > 0;) {
      const auto& lvl = h.levels[li];
      layout = place_level(lvl.graph, lvl.attrs, lvl.links, h.levels[li + 1].graph, layout,
                           mix64(cfg.seed, ci, li), runner, cfg.layout.ideal_length);
      layout = run_single_level(lvl.graph, layout, level_masses(lvl), false, slc, runner);
      if (!cfg.dump_levels_dir.empty()) dump_level(cfg.dump_levels_dir, ci, li, lvl, layout);
      log(2, "component " + std::to_string(ci) + ": refined level " + std::to_string(li));
    }

    for (auto it = pruned.records.rbegin(); it != pruned.records.rend(); ++it)
      layout = reinsert(layout, *it, comp);
    comp_layouts[ci] = std::move(layout);
  }

  drawings.reserve(comps.size());
  for (std::size_t ci = 0; ci < comps.size(); ++ci)
    drawings.push_back({&comps[ci], &comp_layouts[ci]});
  result.layout = arrange_components(drawings);
  result.quality = quality_report(g, result.layout);
  result.stats = runner.totals;
  log(1, "done: cre=" + std::to_string(result.quality.cre) +
             " neld=" + std::to_string(result.quality.neld));
  return result;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  Graph g = load_edge_list_file(cfg.input);
  PipelineResult result = run_pipeline_on(g, cfg);

  ReportData report;
  report.quality = result.quality;
  report.supersteps = result.stats.supersteps;
  report.messages = result.stats.messages;
  report.level_sizes = result.level_sizes;

  auto write_artifact = [&](const std::string& path, ExportFormat format) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    export_drawing(out, format, g, result.layout, &report);
  };
  write_artifact(cfg.svg_out, ExportFormat::svg);
  write_artifact(cfg.coords_out, ExportFormat::coords);
  write_artifact(cfg.report_out, ExportFormat::json_report);
  return result;
}

}  // namespace mlgd
