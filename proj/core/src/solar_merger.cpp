#include "mlgd/solar_merger.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <tuple>

#include "mlgd/bsp.hpp"

namespace mlgd {

namespace {

std::size_t merger_state_size(const MergerState& s) {
  std::size_t sz = 40;  // id, level, mass, state, system_sun, accumulators
  sz += 8 * (s.attrs.planet_list.size() + s.attrs.system_planets.size());
  sz += 16 * s.moon_members.size();
  for (const auto& [other, paths] : s.links) {
    sz += 8;
    for (const auto& p : paths) sz += 8 * p.size();
  }
  return sz;
}

// Keeps each sun's path list sorted and duplicate-free so the table never
// depends on message arrival order.
void insert_path(MergerState& sun_state, LinkPath path) {
  auto& paths = sun_state.links[path.back()];
  auto it = std::lower_bound(paths.begin(), paths.end(), path);
  if (it == paths.end() || *it != path) paths.insert(it, std::move(path));
}

void insert_sorted(std::vector<VertexId>& v, VertexId x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

bool is_candidate(const MergerState& s) {
  return s.fresh && s.attrs.state == VertexState::sun;
}

// Sun generation. Superstep 0: unassigned vertices self-elect with
// probability p. The next three supersteps knock out candidate pairs within
// graph distance 2: candidates broadcast their id, every receiver (any state)
// forwards, and of two candidates hearing each other the lower id reverts to
// unassigned.
struct ElectionProgram {
  using State = MergerState;
  using Message = mlgd::Message;

  bool self_elect = true;
  double p = 0.2;

  static std::size_t message_size(const Message& m) { return mlgd::message_size(m); }
  static std::size_t state_size(const State& s) { return merger_state_size(s); }

  void compute(bsp::Context<ElectionProgram>& ctx) {
    auto& st = ctx.state();
    switch (ctx.superstep()) {
      case 0:
        if (self_elect && st.attrs.state == VertexState::unassigned &&
            ctx.rng().next_double() < p) {
          st.attrs.state = VertexState::sun;
          st.fresh = true;
        }
        // Candidates stay active so they broadcast next superstep.
        if (!is_candidate(st)) ctx.vote_to_halt();
        return;
      case 1:
        if (is_candidate(st)) ctx.send_to_neighbors(Message(Offer{ctx.id()}));
        ctx.vote_to_halt();
        return;
      case 2: {
        for (const auto& env : ctx.inbox()) {
          const auto& offer = std::get<Offer>(env.payload);
          if (is_candidate(st) && offer.sun > ctx.id()) {
            st.attrs.state = VertexState::unassigned;
            st.fresh = false;
          }
        }
        for (const auto& env : ctx.inbox())
          ctx.send_to_neighbors(Message(Offer{std::get<Offer>(env.payload).sun}));
        ctx.vote_to_halt();
        return;
      }
      default: {
        if (is_candidate(st)) {
          for (const auto& env : ctx.inbox()) {
            const auto& offer = std::get<Offer>(env.payload);
            if (offer.sun != ctx.id() && offer.sun > ctx.id()) {
              st.attrs.state = VertexState::unassigned;
              st.fresh = false;
            }
          }
        }
        ctx.vote_to_halt();
        return;
      }
    }
  }
};

// Solar system generation, one pass over the suns elected this round.
//   0: fresh suns broadcast offers.
//   1: unassigned receivers turn planet, confirm, forward the offer.
//   2: suns record planet confirmations; unassigned receivers of forwarded
//      offers turn moon of the greatest-id offering sun, confirm via two-hop,
//      and report conflicting offers to both suns involved.
//   3: relay planets forward the two-hop payloads.
//   4: suns record moon confirmations and conflict paths.
struct GrowthProgram {
  using State = MergerState;
  using Message = mlgd::Message;

  static std::size_t message_size(const Message& m) { return mlgd::message_size(m); }
  static std::size_t state_size(const State& s) { return merger_state_size(s); }

  void compute(bsp::Context<GrowthProgram>& ctx) {
    auto& st = ctx.state();
    switch (ctx.superstep()) {
      case 0:
        if (st.attrs.state == VertexState::sun && st.fresh) {
          st.fresh = false;
          st.system_mass = st.attrs.mass;
          ctx.send_to_neighbors(Message(Offer{ctx.id()}));
        }
        ctx.vote_to_halt();
        return;
      case 1: {
        if (st.attrs.state == VertexState::unassigned) {
          bool any = false;
          VertexId best = 0;
          for (const auto& env : ctx.inbox()) {
            const auto& offer = std::get<Offer>(env.payload);
            if (!any || offer.sun > best) best = offer.sun;
            any = true;
          }
          if (any) {
            st.attrs.state = VertexState::planet;
            st.attrs.system_sun = best;
            ctx.send(best, Message(Confirmation{ctx.id(), st.attrs.mass, ctx.id()}));
            ctx.send_to_neighbors(Message(Offer{best}));
          }
        }
        ctx.vote_to_halt();
        return;
      }
      case 2: {
        if (st.attrs.state == VertexState::sun) {
          for (const auto& env : ctx.inbox()) {
            if (const auto* c = std::get_if<Confirmation>(&env.payload)) {
              insert_sorted(st.attrs.planet_list, c->member);
              st.system_mass += c->mass;
            }
          }
        } else if (st.attrs.state == VertexState::unassigned) {
          bool any = false;
          VertexId best = 0;
          for (const auto& env : ctx.inbox()) {
            const auto& offer = std::get<Offer>(env.payload);
            if (!any || offer.sun > best) best = offer.sun;
            any = true;
          }
          if (any) {
            st.attrs.state = VertexState::moon;
            st.attrs.system_sun = best;
            for (const auto& env : ctx.inbox()) {
              if (std::get<Offer>(env.payload).sun == best)
                insert_sorted(st.attrs.system_planets, env.sender);
            }
            const VertexId relay = st.attrs.relay();
            ctx.send(relay, Message(two_hop(best, Confirmation{ctx.id(), st.attrs.mass, relay})));
            for (const auto& env : ctx.inbox()) {
              const auto& offer = std::get<Offer>(env.payload);
              if (offer.sun == best) continue;
              LinkPath path{best, relay, ctx.id(), env.sender, offer.sun};
              ctx.send(relay, Message(two_hop(best, Conflict{path})));
              LinkPath rev(path.rbegin(), path.rend());
              ctx.send(env.sender, Message(two_hop(offer.sun, Conflict{std::move(rev)})));
            }
          }
        }
        // Planets and moons ignore late offers; they already belong somewhere.
        ctx.vote_to_halt();
        return;
      }
      case 3:
        for (const auto& env : ctx.inbox()) {
          if (const auto* th = std::get_if<TwoHop>(&env.payload))
            ctx.send(th->final_target, th->payload->msg);
        }
        ctx.vote_to_halt();
        return;
      default:
        if (st.attrs.state == VertexState::sun) {
          for (const auto& env : ctx.inbox()) {
            if (const auto* c = std::get_if<Confirmation>(&env.payload)) {
              st.moon_members.emplace_back(c->member, c->relay);
              st.system_mass += c->mass;
            } else if (const auto* cf = std::get_if<Conflict>(&env.payload)) {
              insert_path(st, cf->path);
            }
          }
        }
        ctx.vote_to_halt();
        return;
    }
  }
};

std::vector<VertexId> route_to_sun(const MergerState& st, VertexId self) {
  switch (st.attrs.state) {
    case VertexState::sun:
      return {self};
    case VertexState::planet:
      return {self, *st.attrs.system_sun};
    case VertexState::moon:
      return {self, st.attrs.relay(), *st.attrs.system_sun};
    default:
      throw std::logic_error("link discovery on an unassigned vertex");
  }
}

// Inter-system link generation.
//   0: every vertex broadcasts its route to its sun.
//   1: receivers in a different system report the witnessed sun-to-sun path
//      to their own sun (suns record directly, planets send, moons two-hop).
//   2: suns record planet reports; relay planets forward the two-hops.
//   3: suns record moon reports.
struct DiscoverProgram {
  using State = MergerState;
  using Message = mlgd::Message;

  static std::size_t message_size(const Message& m) { return mlgd::message_size(m); }
  static std::size_t state_size(const State& s) { return merger_state_size(s); }

  void compute(bsp::Context<DiscoverProgram>& ctx) {
    auto& st = ctx.state();
    switch (ctx.superstep()) {
      case 0:
        ctx.send_to_neighbors(Message(InterLinkDiscovery{route_to_sun(st, ctx.id())}));
        ctx.vote_to_halt();
        return;
      case 1: {
        const VertexId my_sun =
            st.attrs.state == VertexState::sun ? ctx.id() : *st.attrs.system_sun;
        std::vector<VertexId> own = route_to_sun(st, ctx.id());
        std::reverse(own.begin(), own.end());  // [my_sun, ..., self]
        for (const auto& env : ctx.inbox()) {
          const auto& d = std::get<InterLinkDiscovery>(env.payload);
          if (d.route.back() == my_sun) continue;
          LinkPath path = own;
          path.insert(path.end(), d.route.begin(), d.route.end());
          if (st.attrs.state == VertexState::sun) {
            insert_path(st, std::move(path));
          } else if (st.attrs.state == VertexState::planet) {
            ctx.send(my_sun, Message(Conflict{std::move(path)}));
          } else {
            ctx.send(st.attrs.relay(), Message(two_hop(my_sun, Conflict{std::move(path)})));
          }
        }
        ctx.vote_to_halt();
        return;
      }
      default:
        for (const auto& env : ctx.inbox()) {
          if (const auto* th = std::get_if<TwoHop>(&env.payload)) {
            ctx.send(th->final_target, th->payload->msg);
          } else if (const auto* cf = std::get_if<Conflict>(&env.payload)) {
            insert_path(st, cf->path);
          }
        }
        ctx.vote_to_halt();
        return;
    }
  }
};

std::size_t count_unassigned(const std::vector<MergerState>& states) {
  std::size_t c = 0;
  for (const auto& s : states)
    if (s.attrs.state == VertexState::unassigned) ++c;
  return c;
}

std::vector<VertexId> collect_fresh(const Graph& g, const std::vector<MergerState>& states) {
  std::vector<VertexId> out;
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i)
    if (is_candidate(states[i])) out.push_back(g.id_at(i));
  return out;
}

}  // namespace

std::vector<MergerState> make_initial_states(
    const Graph& g, std::uint32_t level,
    const std::unordered_map<VertexId, std::uint32_t>* leaf_counts) {
  std::vector<MergerState> states(g.vertex_count());
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    auto& a = states[i].attrs;
    a.id = g.id_at(i);
    a.level = level;
    a.mass = 1.0;
    if (leaf_counts != nullptr) {
      auto it = leaf_counts->find(a.id);
      if (it != leaf_counts->end()) a.mass += it->second;
    }
  }
  return states;
}

std::vector<VertexId> resolve_sun_conflicts(const Graph& level, std::vector<MergerState>& states,
                                            PhaseRunner& runner) {
  ElectionProgram prog;
  prog.self_elect = false;
  auto res = bsp::run(level, prog, std::move(states), runner.config_for(level));
  runner.record(res.stats);
  states = std::move(res.states);
  return collect_fresh(level, states);
}

std::vector<VertexId> elect_suns(const Graph& level, std::vector<MergerState>& states, double p,
                                 PhaseRunner& runner) {
  for (auto& s : states) s.fresh = false;
  ElectionProgram prog;
  prog.self_elect = true;
  prog.p = p;
  auto res = bsp::run(level, prog, std::move(states), runner.config_for(level));
  runner.record(res.stats);
  states = std::move(res.states);
  return collect_fresh(level, states);
}

std::size_t grow_systems(const Graph& level, std::vector<MergerState>& states,
                         PhaseRunner& runner) {
  const std::size_t before = count_unassigned(states);
  GrowthProgram prog;
  auto res = bsp::run(level, prog, std::move(states), runner.config_for(level));
  runner.record(res.stats);
  states = std::move(res.states);
  for (auto& s : states) std::sort(s.moon_members.begin(), s.moon_members.end());
  return before - count_unassigned(states);
}

void discover_links(const Graph& level, std::vector<MergerState>& states, PhaseRunner& runner) {
  DiscoverProgram prog;
  auto res = bsp::run(level, prog, std::move(states), runner.config_for(level));
  runner.record(res.stats);
  states = std::move(res.states);
}

void coarsen_level(const Graph& level, std::vector<MergerState>& states, double sun_probability,
                   PhaseRunner& runner) {
  while (count_unassigned(states) > 0) {
    auto fresh = elect_suns(level, states, sun_probability, runner);
    if (fresh.empty()) {
      // Progress guarantee: promote the minimum-id unassigned vertex. Ids are
      // in index order, so the first unassigned state is the minimum.
      for (auto& s : states) {
        if (s.attrs.state == VertexState::unassigned) {
          s.attrs.state = VertexState::sun;
          s.fresh = true;
          break;
        }
      }
    }
    grow_systems(level, states, runner);
  }
  discover_links(level, states, runner);
}

NextLevel build_next_level(const Graph& level, const std::vector<MergerState>& states) {
  NextLevel out;
  std::vector<VertexId> suns;
  std::vector<std::tuple<VertexId, VertexId, double>> edges;
  for (std::uint32_t i = 0; i < level.vertex_count(); ++i) {
    const auto& s = states[i];
    const VertexId id = level.id_at(i);
    switch (s.attrs.state) {
      case VertexState::sun:
        out.parent.emplace(id, id);
        suns.push_back(id);
        for (const auto& [other, paths] : s.links) {
          std::size_t longest = 0;
          for (const auto& p : paths) longest = std::max(longest, p.size());
          edges.emplace_back(id, other, static_cast<double>(longest));
        }
        break;
      case VertexState::planet:
      case VertexState::moon:
        out.parent.emplace(id, *s.attrs.system_sun);
        break;
      default:
        throw std::logic_error("build_next_level: unassigned vertex remains");
    }
  }

  out.graph = Graph::build(edges, suns);
  out.states.resize(out.graph.vertex_count());
  for (std::uint32_t i = 0; i < level.vertex_count(); ++i) {
    const auto& s = states[i];
    if (s.attrs.state != VertexState::sun) continue;
    auto& c = out.states[out.graph.index_of(level.id_at(i))];
    c.attrs.id = s.attrs.id;
    c.attrs.level = s.attrs.level + 1;
    c.attrs.mass = s.system_mass;
  }
  return out;
}

InterLinkTable extract_links(const std::vector<MergerState>& states) {
  InterLinkTable table;
  for (const auto& s : states) {
    if (s.attrs.state != VertexState::sun || s.links.empty()) continue;
    table.by_sun.emplace(s.attrs.id, s.links);
  }
  return table;
}

std::vector<VertexAttrs> extract_attrs(const std::vector<MergerState>& states) {
  std::vector<VertexAttrs> attrs;
  attrs.reserve(states.size());
  for (const auto& s : states) attrs.push_back(s.attrs);
  return attrs;
}

Hierarchy build_hierarchy(const Graph& component,
                          const std::unordered_map<VertexId, std::uint32_t>& leaf_counts,
                          const MergerConfig& cfg, PhaseRunner& runner) {
  Hierarchy h;
  Graph cur = component;
  std::vector<MergerState> states = make_initial_states(cur, 0, &leaf_counts);
  for (;;) {
    if (cur.vertex_count() < cfg.coarsen_threshold || cur.vertex_count() <= 1) {
      h.levels.push_back({std::move(cur), extract_attrs(states), {}});
      break;
    }
    coarsen_level(cur, states, cfg.sun_probability, runner);
    NextLevel next = build_next_level(cur, states);
    h.levels.push_back({std::move(cur), extract_attrs(states), extract_links(states)});
    h.parent.push_back(std::move(next.parent));
    cur = std::move(next.graph);
    states = std::move(next.states);
  }
  return h;
}

}  // namespace mlgd
