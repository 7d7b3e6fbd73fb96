#include "mlgd/gila.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <unordered_map>

#include "mlgd/bsp.hpp"
#include "mlgd/messages.hpp"

namespace mlgd {

namespace {
constexpr double kCoincident = 1e-6;
}

int choose_k(std::int64_t edge_count) {
  if (edge_count < 0) throw std::invalid_argument("choose_k: negative edge count");
  if (edge_count < 1'000) return 6;
  if (edge_count < 5'000) return 5;
  if (edge_count < 10'000) return 4;
  if (edge_count < 100'000) return 3;
  if (edge_count < 1'000'000) return 2;
  return 1;
}

Vec2 repulsion_between(Vec2 at, Vec2 from, double mass_factor, const LayoutParams& p,
                       VertexId at_id, VertexId from_id, std::uint64_t seed) {
  Vec2 d = at - from;
  double dist = d.norm();
  Vec2 dir;
  if (dist < kCoincident) {
    const VertexId lo = std::min(at_id, from_id);
    const VertexId hi = std::max(at_id, from_id);
    SplitMix64 r(mix64(seed, lo, hi));
    dir = r.unit_vector();
    if (at_id != lo) dir = -dir;
    dist = kCoincident;
  } else {
    dir = d / dist;
  }
  const double f =
      p.repulsion_constant * p.ideal_length * p.ideal_length / dist * mass_factor;
  return dir * f;
}

Vec2 attraction_along(Vec2 at, Vec2 toward, double edge_weight, const LayoutParams& p) {
  const Vec2 d = toward - at;
  const double dist = d.norm();
  if (dist <= 0.0) return {0.0, 0.0};
  const double desired = p.ideal_length * std::max(edge_weight, 2.0) / 2.0;
  return (d / dist) * (dist * dist / desired);
}

double max_displacement(const LayoutParams& p, int iteration, int iterations) {
  const double frac = 1.0 - static_cast<double>(iteration) / static_cast<double>(iterations);
  return p.initial_max_displacement * std::pow(frac, p.cooling_exponent);
}

namespace {

// Shared force fold: repulsion over the whole view, attraction along graph
// edges, net displacement clamped by the cooling schedule. `edge_pos` yields
// the current position of a direct neighbor.
template <typename EdgePos>
Vec2 net_displacement(Vec2 pos, VertexId id, const NeighborhoodView& view,
                      std::span<const Graph::Neighbor> edges, EdgePos&& edge_pos,
                      double mean_mass, const LayoutParams& p, int t, int T,
                      std::uint64_t seed) {
  Vec2 net{0.0, 0.0};
  for (const auto& e : view) {
    const double mf = p.mass_repulsion ? e.mass / mean_mass : 1.0;
    net += repulsion_between(pos, e.position, mf, p, id, e.id, seed);
  }
  for (const auto& nb : edges) net += attraction_along(pos, edge_pos(nb), nb.weight, p);
  const double len = net.norm();
  const double cap = max_displacement(p, t, T);
  if (len > cap) net = net * (cap / len);
  return net;
}

// Per-superstep script of a layout run. hop == 0 marks the initial
// send-only step.
struct StepPlan {
  std::uint16_t hop = 0;
  std::uint16_t cycle = 0;  // waves in the current iteration (k or 1)
  std::int32_t iteration = -1;
  bool move = false;
  bool send_next = false;
  bool clear_next = false;
};

std::vector<StepPlan> build_plan(int iterations, int k, int reflood_period, bool move_enabled) {
  auto full = [&](int i) { return reflood_period <= 1 || i % reflood_period == 0; };
  std::vector<StepPlan> plan;
  plan.push_back({0, 0, -1, false, true, false});
  for (int i = 0; i < iterations; ++i) {
    const std::uint16_t cyc = full(i) ? static_cast<std::uint16_t>(k) : 1;
    for (std::uint16_t h = 1; h <= cyc; ++h) {
      StepPlan sp;
      sp.hop = h;
      sp.cycle = cyc;
      sp.iteration = i;
      sp.move = move_enabled && h == cyc;
      sp.send_next = h == cyc && i + 1 < iterations;
      sp.clear_next = sp.send_next && full(i + 1);
      plan.push_back(sp);
    }
  }
  return plan;
}

struct FRState {
  Vec2 pos{0.0, 0.0};
  double mass = 1.0;
  NeighborhoodView view;
  std::unordered_map<VertexId, std::uint32_t> seen;  // origin -> view slot
  bool dirty = false;                                // view needs re-sorting before a fold
};

struct FRProgram {
  using State = FRState;
  using Message = mlgd::Message;

  const std::vector<StepPlan>* plan = nullptr;
  LayoutParams params;
  double mean_mass = 1.0;
  int iterations = 1;
  std::uint64_t seed = 0;

  static std::size_t message_size(const Message& m) { return mlgd::message_size(m); }
  static std::size_t state_size(const State& s) { return 24 + 34 * s.view.size(); }

  void compute(bsp::Context<FRProgram>& ctx) {
    auto& st = ctx.state();
    const int t = ctx.superstep();
    const StepPlan& sp = (*plan)[t];

    if (sp.hop == 0) {
      ctx.send_to_neighbors(Message(PositionFlood{ctx.id(), st.pos, st.mass}));
      return;  // stay active; later steps are clocked by the plan, not by mail
    }

    if (sp.cycle > 1 || sp.hop == 1) {
      // Flooding wave: record first sightings, forward them while hop < k.
      // In light (cycle == 1) iterations only direct neighbors broadcast, so
      // this just refreshes their positions.
      for (const auto& env : ctx.inbox()) {
        const auto& pf = std::get<PositionFlood>(env.payload);
        if (pf.origin == ctx.id()) continue;
        auto [it, fresh] = st.seen.try_emplace(pf.origin, static_cast<std::uint32_t>(st.view.size()));
        if (fresh) {
          st.view.push_back({pf.origin, pf.position, sp.hop, pf.mass});
          st.dirty = true;
          if (sp.hop < sp.cycle)
            ctx.send_to_neighbors(Message(PositionFlood{pf.origin, pf.position, pf.mass}));
        } else if (sp.hop == 1) {
          st.view[it->second].position = pf.position;
        }
      }
    }

    if (sp.move) {
      if (st.dirty) {
        std::sort(st.view.begin(), st.view.end(),
                  [](const NeighborEntry& a, const NeighborEntry& b) { return a.id < b.id; });
        for (std::uint32_t i = 0; i < st.view.size(); ++i) st.seen[st.view[i].id] = i;
        st.dirty = false;
      }
      const auto& seen = st.seen;
      const auto& view = st.view;
      st.pos += net_displacement(
          st.pos, ctx.id(), view, ctx.neighbors(),
          [&](const Graph::Neighbor& nb) { return view[seen.at(nb.id)].position; }, mean_mass,
          params, sp.iteration, iterations, seed);
    }

    if (sp.send_next) {
      if (sp.clear_next) {
        st.view.clear();
        st.seen.clear();
        st.dirty = false;
      }
      ctx.send_to_neighbors(Message(PositionFlood{ctx.id(), st.pos, st.mass}));
    }

    if (t + 1 >= static_cast<int>(plan->size())) ctx.vote_to_halt();
  }
};

std::vector<FRState> make_states(const Graph& g, const Layout& layout,
                                 std::span<const double> masses) {
  std::vector<FRState> states(g.vertex_count());
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    states[i].pos = layout.at(g.id_at(i));
    states[i].mass = masses.empty() ? 1.0 : masses[i];
  }
  return states;
}

double mean_of(std::span<const double> masses, std::size_t n) {
  if (masses.empty()) return 1.0;
  double s = 0.0;
  for (double m : masses) s += m;
  return s / static_cast<double>(n);
}

}  // namespace

std::vector<NeighborhoodView> flood_neighborhoods(const Graph& g, const Layout& layout,
                                                  std::span<const double> masses, int k,
                                                  PhaseRunner& runner) {
  if (k < 1) throw std::invalid_argument("flood_neighborhoods: k must be >= 1");
  const auto plan = build_plan(1, k, 1, /*move_enabled=*/false);
  FRProgram prog;
  prog.plan = &plan;
  prog.iterations = 1;
  auto cfg = runner.config_for(g);
  cfg.max_supersteps = static_cast<int>(plan.size()) + 1;
  prog.seed = cfg.seed;
  auto res = bsp::run(g, prog, make_states(g, layout, masses), cfg);
  runner.record(res.stats);

  std::vector<NeighborhoodView> views(g.vertex_count());
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    views[i] = std::move(res.states[i].view);
    std::sort(views[i].begin(), views[i].end(),
              [](const NeighborEntry& a, const NeighborEntry& b) { return a.id < b.id; });
  }
  return views;
}

Layout step_forces(const Graph& g, const Layout& layout,
                   const std::vector<NeighborhoodView>& views, std::span<const double> masses,
                   const LayoutParams& params, int iteration, int iterations,
                   std::uint64_t seed) {
  const double mean_mass = mean_of(masses, g.vertex_count());
  const auto pos = layout.dense(g);
  Layout out;
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    const Vec2 d = net_displacement(
        pos[i], g.id_at(i), views[i], g.neighbors(i),
        [&](const Graph::Neighbor& nb) { return pos[nb.index]; }, mean_mass, params, iteration,
        iterations, seed);
    out.set(g.id_at(i), pos[i] + d);
  }
  return out;
}

Layout run_single_level(const Graph& g, const Layout& initial, std::span<const double> masses,
                        bool coarsest, const SingleLevelConfig& cfg, PhaseRunner& runner) {
  const int iterations = coarsest ? cfg.coarsest_iterations : cfg.refine_iterations;
  const int k = cfg.params.k > 0 ? cfg.params.k
                                 : choose_k(static_cast<std::int64_t>(g.edge_count()));
  const auto plan = build_plan(iterations, k, cfg.params.reflood_period, true);

  FRProgram prog;
  prog.plan = &plan;
  prog.params = cfg.params;
  prog.mean_mass = mean_of(masses, g.vertex_count());
  prog.iterations = iterations;

  auto engine_cfg = runner.config_for(g);
  engine_cfg.max_supersteps = static_cast<int>(plan.size()) + 1;
  prog.seed = engine_cfg.seed;

  auto res = bsp::run(g, prog, make_states(g, initial, masses), engine_cfg);
  runner.record(res.stats);

  Layout out;
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) out.set(g.id_at(i), res.states[i].pos);
  return out;
}

}  // namespace mlgd
