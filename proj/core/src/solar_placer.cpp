#include "mlgd/solar_placer.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <vector>

#include "mlgd/bsp.hpp"
#include "mlgd/messages.hpp"

namespace mlgd {

namespace {

struct SunData {
  Vec2 pos;
  double rho = 1.0;
  std::map<VertexId, Vec2> neighbor_pos;               // linked sun -> coarse position
  std::map<VertexId, std::vector<LinkPath>> links;     // own table
  std::vector<std::pair<VertexId, VertexId>> members;  // (member, relay); relay==member for planets
};

struct PlacerState {
  Vec2 pos{0.0, 0.0};
  bool placed = false;
  std::shared_ptr<const SunData> sun;  // null on planets and moons
};

struct PlacerProgram {
  using State = PlacerState;
  using Message = mlgd::Message;

  std::uint64_t seed = 0;

  static std::size_t message_size(const Message& m) { return mlgd::message_size(m); }
  static std::size_t state_size(const State& s) {
    std::size_t sz = 24;
    if (s.sun) {
      sz += 24 * s.sun->neighbor_pos.size() + 16 * s.sun->members.size();
      for (const auto& [other, paths] : s.sun->links)
        for (const auto& p : paths) sz += 8 * p.size();
    }
    return sz;
  }

  void compute(bsp::Context<PlacerProgram>& ctx) {
    auto& st = ctx.state();
    switch (ctx.superstep()) {
      case 0: {
        if (st.sun) {
          const SunData& sd = *st.sun;
          st.pos = sd.pos;
          st.placed = true;

          // Candidate points per member from every link path through it.
          std::map<VertexId, std::pair<Vec2, int>> acc;
          for (const auto& [member, relay] : sd.members) acc.emplace(member, std::make_pair(Vec2{}, 0));
          for (const auto& [other, paths] : sd.links) {
            const Vec2 to = sd.neighbor_pos.at(other);
            for (const auto& path : paths) {
              const double hops = static_cast<double>(path.size() - 1);
              for (std::size_t d = 1; d + 1 < path.size(); ++d) {
                auto it = acc.find(path[d]);
                if (it == acc.end()) continue;  // other system's half of the path
                const double f = static_cast<double>(d) / hops;
                it->second.first += sd.pos + (to - sd.pos) * f;
                it->second.second += 1;
              }
            }
          }

          for (const auto& [member, relay] : sd.members) {
            const auto& [sum, count] = acc.at(member);
            Vec2 p;
            if (count > 0) {
              p = sum / static_cast<double>(count);
            } else {
              SplitMix64 r(mix64(seed, member, 0xD15C));
              const double rad = sd.rho * std::sqrt(r.next_double());
              p = sd.pos + r.unit_vector() * rad;
            }
            if (relay == member) {
              ctx.send(member, Message(PositionAssignment{member, p}));
            } else {
              ctx.send(relay, Message(two_hop(member, PositionAssignment{member, p})));
            }
          }
        }
        ctx.vote_to_halt();
        return;
      }
      default: {
        for (const auto& env : ctx.inbox()) {
          if (const auto* th = std::get_if<TwoHop>(&env.payload)) {
            ctx.send(th->final_target, th->payload->msg);
          } else if (const auto* pa = std::get_if<PositionAssignment>(&env.payload)) {
            st.pos = pa->position;
            st.placed = true;
          }
        }
        ctx.vote_to_halt();
        return;
      }
    }
  }
};

}  // namespace

Layout place_level(const Graph& level, const std::vector<VertexAttrs>& attrs,
                   const InterLinkTable& links, const Graph& coarse,
                   const Layout& coarse_layout, std::uint64_t seed, PhaseRunner& runner,
                   double fallback_radius) {
  const std::size_t n = level.vertex_count();
  std::vector<PlacerState> states(n);

  // Member lists per sun.
  std::map<VertexId, std::vector<std::pair<VertexId, VertexId>>> members;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& a = attrs[i];
    if (a.state == VertexState::planet) {
      members[*a.system_sun].emplace_back(a.id, a.id);
    } else if (a.state == VertexState::moon) {
      members[*a.system_sun].emplace_back(a.id, a.relay());
    }
  }

  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& a = attrs[i];
    if (a.state != VertexState::sun) continue;
    auto sd = std::make_shared<SunData>();

    const auto ci = coarse.find(a.id);
    if (!ci || !coarse_layout.contains(a.id)) throw MissingCoarsePosition(a.id);
    sd->pos = coarse_layout.at(a.id);

    double len_sum = 0.0;
    std::size_t len_count = 0;
    for (const auto& nb : coarse.neighbors(*ci)) {
      if (!coarse_layout.contains(nb.id)) throw MissingCoarsePosition(nb.id);
      const Vec2 np = coarse_layout.at(nb.id);
      sd->neighbor_pos.emplace(nb.id, np);
      len_sum += distance(np, sd->pos);
      ++len_count;
    }
    sd->rho = len_count > 0 ? 0.5 * len_sum / static_cast<double>(len_count) : fallback_radius;

    if (const auto* sun_links = links.by_sun.count(a.id) ? &links.by_sun.at(a.id) : nullptr)
      sd->links = *sun_links;
    if (auto it = members.find(a.id); it != members.end()) {
      std::sort(it->second.begin(), it->second.end());
      sd->members = std::move(it->second);
    }
    states[i].sun = std::move(sd);
  }

  PlacerProgram prog;
  prog.seed = seed;
  auto res = bsp::run(level, prog, std::move(states), runner.config_for(level));
  runner.record(res.stats);

  Layout out;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!res.states[i].placed)
      throw std::logic_error("place_level: vertex " + std::to_string(level.id_at(i)) +
                             " was never assigned a position");
    out.set(level.id_at(i), res.states[i].pos);
  }
  return out;
}

}  // namespace mlgd
