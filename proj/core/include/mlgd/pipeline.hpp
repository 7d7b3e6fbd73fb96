#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlgd/gila.hpp"
#include "mlgd/graph.hpp"
#include "mlgd/metrics.hpp"
#include "mlgd/runner.hpp"

namespace mlgd {

struct PipelineConfig {
  std::string input;
  std::string svg_out;
  std::string coords_out;
  std::string report_out;
  std::string dump_levels_dir;

  int workers = 1;
  std::uint64_t seed = 0;

  double sun_probability = 0.2;
  std::size_t coarsen_threshold = 30;

  int partitions = 0;  // 0: one per worker
  double balance_epsilon = 0.05;
  int partition_rounds = 30;

  int prune_iterations = 1;

  LayoutParams layout;
  int coarsest_iterations = 300;
  int refine_iterations = 50;

  int verbosity = 0;
  bool shuffle_inboxes = false;  // stress mode used by tests
};

struct PipelineResult {
  Layout layout;  // arranged drawing of the whole input graph
  QualityReport quality;
  StatsTotals stats;
  std::vector<std::vector<std::size_t>> level_sizes;  // per component
};

/// Full sequence on an already-loaded graph: per component prune ->
/// hierarchy -> coarsest layout from random placement -> alternate place /
/// refine down to level 0 -> reinsert leaves; then component arrangement.
/// Writes per-level dumps when dump_levels_dir is set; other artifact paths
/// are handled by run_pipeline.
PipelineResult run_pipeline_on(const Graph& g, const PipelineConfig& cfg);

/// Loads cfg.input, runs the pipeline, writes the requested artifacts.
PipelineResult run_pipeline(const PipelineConfig& cfg);

}  // namespace mlgd
