#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "mlgd/pipeline.hpp"

namespace {

int default_workers() {
  if (const char* env = std::getenv("MLGD_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

struct CliState {
  mlgd::PipelineConfig cfg;
  std::string mass_repulsion = "on";
  bool print_config = false;
};

// key=value lines with optional [section] headers; '#' starts a comment.
void load_config_file(const std::string& path, CliState& s) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string t) {
      const auto b = t.find_first_not_of(" \t\r");
      const auto e = t.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto& cfg = s.cfg;
    if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "workers") cfg.workers = std::stoi(value);
    else if (key == "partitions") cfg.partitions = std::stoi(value);
    else if (key == "balance-epsilon") cfg.balance_epsilon = std::stod(value);
    else if (key == "partition-rounds") cfg.partition_rounds = std::stoi(value);
    else if (key == "sun-probability") cfg.sun_probability = std::stod(value);
    else if (key == "coarsen-threshold") cfg.coarsen_threshold = std::stoul(value);
    else if (key == "prune-iterations") cfg.prune_iterations = std::stoi(value);
    else if (key == "mass-repulsion") s.mass_repulsion = value;
    else if (key == "svg") cfg.svg_out = value;
    else if (key == "coords") cfg.coords_out = value;
    else if (key == "report") cfg.report_out = value;
    else if (key == "dump-levels") cfg.dump_levels_dir = value;
    else if (key == "layout.ideal-length") cfg.layout.ideal_length = std::stod(value);
    else if (key == "layout.repulsion-constant") cfg.layout.repulsion_constant = std::stod(value);
    else if (key == "layout.initial-max-displacement")
      cfg.layout.initial_max_displacement = std::stod(value);
    else if (key == "layout.cooling-exponent") cfg.layout.cooling_exponent = std::stod(value);
    else if (key == "layout.reflood-period") cfg.layout.reflood_period = std::stoi(value);
    else if (key == "layout.k") cfg.layout.k = std::stoi(value);
    else if (key == "layout.coarsest-iterations") cfg.coarsest_iterations = std::stoi(value);
    else if (key == "layout.refine-iterations") cfg.refine_iterations = std::stoi(value);
    else
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
  }
}

std::string effective_config(const CliState& s) {
  const auto& cfg = s.cfg;
  std::ostringstream out;
  out << "seed=" << cfg.seed << "\n"
      << "workers=" << cfg.workers << "\n"
      << "partitions=" << (cfg.partitions > 0 ? cfg.partitions : cfg.workers) << "\n"
      << "balance-epsilon=" << cfg.balance_epsilon << "\n"
      << "partition-rounds=" << cfg.partition_rounds << "\n"
      << "sun-probability=" << cfg.sun_probability << "\n"
      << "coarsen-threshold=" << cfg.coarsen_threshold << "\n"
      << "prune-iterations=" << cfg.prune_iterations << "\n"
      << "mass-repulsion=" << (cfg.layout.mass_repulsion ? "on" : "off") << "\n"
      << "[layout]\n"
      << "ideal-length=" << cfg.layout.ideal_length << "\n"
      << "repulsion-constant=" << cfg.layout.repulsion_constant << "\n"
      << "initial-max-displacement=" << cfg.layout.initial_max_displacement << "\n"
      << "cooling-exponent=" << cfg.layout.cooling_exponent << "\n"
      << "reflood-period=" << cfg.layout.reflood_period << "\n"
      << "k=" << cfg.layout.k << "\n"
      << "coarsest-iterations=" << cfg.coarsest_iterations << "\n"
      << "refine-iterations=" << cfg.refine_iterations << "\n";
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel vertex-centric force-directed graph layout"};
  app.require_subcommand(1);

  CliState s;
  s.cfg.workers = default_workers();
  std::string config_path;

  // Config file first, flags override.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  }
  try {
    if (!config_path.empty()) load_config_file(config_path, s);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  auto* lay = app.add_subcommand("layout", "compute a 2-D layout of an edge-list graph");
  std::string input;
  lay->add_option("input", input, "edge list file (\"u v\" per line, # comments)");
  lay->add_option("--config", config_path, "key=value config file (already applied)");
  lay->add_option("--svg", s.cfg.svg_out, "write an SVG rendering");
  lay->add_option("--coords", s.cfg.coords_out, "write \"id x y\" coordinates");
  lay->add_option("--report", s.cfg.report_out, "write the JSON quality report");
  lay->add_option("--dump-levels", s.cfg.dump_levels_dir, "dump per-level graphs and layouts");
  lay->add_option("--workers", s.cfg.workers, "BSP workers (default: MLGD_WORKERS or cores)");
  lay->add_option("--seed", s.cfg.seed, "run seed (default 0; runs are reproducible)");
  lay->add_option("--partitions", s.cfg.partitions, "partition count (default: workers)");
  lay->add_option("--balance-epsilon", s.cfg.balance_epsilon, "partition balance slack");
  lay->add_option("--partition-rounds", s.cfg.partition_rounds, "label propagation rounds");
  lay->add_option("--sun-probability", s.cfg.sun_probability, "election probability p");
  lay->add_option("--coarsen-threshold", s.cfg.coarsen_threshold,
                  "stop coarsening below this vertex count");
  lay->add_option("--prune-iterations", s.cfg.prune_iterations, "degree-one pruning passes");
  lay->add_option("--mass-repulsion", s.mass_repulsion, "on|off mass-aware repulsion")
      ->check(CLI::IsMember({"on", "off"}));
  lay->add_option("--ideal-length", s.cfg.layout.ideal_length, "ideal edge length");
  lay->add_option("--repulsion-constant", s.cfg.layout.repulsion_constant, "FR repulsion C");
  lay->add_option("--max-displacement", s.cfg.layout.initial_max_displacement,
                  "initial per-iteration displacement cap");
  lay->add_option("--cooling-exponent", s.cfg.layout.cooling_exponent, "cooling exponent");
  lay->add_option("--reflood-period", s.cfg.layout.reflood_period,
                  "full k-hop reflood every N iterations");
  lay->add_option("--k", s.cfg.layout.k, "repulsion horizon (0 = edge-count schedule)");
  lay->add_option("--coarsest-iterations", s.cfg.coarsest_iterations,
                  "iterations on the coarsest level");
  lay->add_option("--refine-iterations", s.cfg.refine_iterations,
                  "iterations on refined levels");
  lay->add_flag("--print-config", s.print_config, "print the effective configuration");
  lay->add_flag("-v,--verbose", s.cfg.verbosity, "log phase progress to stderr");

  CLI11_PARSE(app, argc, argv);

  s.cfg.layout.mass_repulsion = s.mass_repulsion == "on";

  if (s.print_config) {
    std::cout << effective_config(s);
    if (input.empty()) return 0;
  }
  if (input.empty()) {
    std::cerr << "error: no input file given\n";
    return 1;
  }
  s.cfg.input = input;

  try {
    const mlgd::PipelineResult result = mlgd::run_pipeline(s.cfg);
    std::cout << "vertices drawn: " << result.layout.size() << "\n"
              << "crossings: " << result.quality.crossings_total << "\n"
              << "cre: " << result.quality.cre << "\n"
              << "neld: " << result.quality.neld << "\n"
              << "mean edge length: " << result.quality.mean_edge_length << "\n"
              << "supersteps: " << result.stats.supersteps << "\n"
              << "messages: " << result.stats.messages << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
