#include <doctest.h>

#include "mlgd/solar_merger.hpp"
#include "mlgd/solar_placer.hpp"
#include "support/generators.hpp"

using namespace mlgd;
namespace tg = mlgd::testing;

namespace {

// Runs the real coarsening protocol with the given suns pre-elected and
// returns everything place_level needs.
struct Coarsened {
  std::vector<VertexAttrs> attrs;
  InterLinkTable links;
  NextLevel next;
};

Coarsened coarsen_with_suns(const Graph& g, const std::vector<VertexId>& suns,
                            PhaseRunner& runner) {
  auto states = make_initial_states(g, 0);
  for (VertexId s : suns) {
    auto& ms = states[g.index_of(s)];
    ms.attrs.state = VertexState::sun;
    ms.fresh = true;
  }
  grow_systems(g, states, runner);
  discover_links(g, states, runner);
  return {extract_attrs(states), extract_links(states), build_next_level(g, states)};
}

}  // namespace

TEST_CASE("planets interpolate along planet-planet link paths") {
  // suns 1, 2 joined through planets 10, 11; path [1,10,11,2], L = 3 hops
  const Graph g = Graph::from_edges(
      std::vector<std::pair<VertexId, VertexId>>{{1, 10}, {10, 11}, {11, 2}});
  PhaseRunner r(1, 1);
  auto c = coarsen_with_suns(g, {1, 2}, r);
  Layout coarse;
  coarse.set(1, {0.0, 0.0});
  coarse.set(2, {4.0, 0.0});
  const Layout placed = place_level(g, c.attrs, c.links, c.next.graph, coarse, 0, r);
  CHECK(placed.at(1) == Vec2{0.0, 0.0});
  CHECK(placed.at(2) == Vec2{4.0, 0.0});
  CHECK(placed.at(10).x == doctest::Approx(4.0 / 3.0));
  CHECK(placed.at(10).y == doctest::Approx(0.0));
  CHECK(placed.at(11).x == doctest::Approx(8.0 / 3.0));
  CHECK(placed.at(11).y == doctest::Approx(0.0));
}

TEST_CASE("a shared planet on one sun-planet-sun path sits at the midpoint") {
  const Graph g =
      Graph::from_edges(std::vector<std::pair<VertexId, VertexId>>{{1, 10}, {10, 2}});
  PhaseRunner r(1, 1);
  auto c = coarsen_with_suns(g, {1, 2}, r);
  Layout coarse;
  coarse.set(1, {0.0, 0.0});
  coarse.set(2, {2.0, 2.0});
  const Layout placed = place_level(g, c.attrs, c.links, c.next.graph, coarse, 0, r);
  CHECK(placed.at(10).x == doctest::Approx(1.0));
  CHECK(placed.at(10).y == doctest::Approx(1.0));
}

TEST_CASE("unlinked members fall inside the disc around their sun") {
  const Graph g = tg::path(5);  // single system around sun 3, no links at all
  PhaseRunner r(1, 1);
  auto c = coarsen_with_suns(g, {3}, r);
  REQUIRE(c.next.graph.vertex_count() == 1);
  Layout coarse;
  coarse.set(3, {5.0, 5.0});
  const double rho = 2.0;  // isolated coarse vertex: the fallback radius
  const Layout placed = place_level(g, c.attrs, c.links, c.next.graph, coarse, 7, r, rho);
  CHECK(placed.at(3) == Vec2{5.0, 5.0});
  for (VertexId v : {1ull, 2ull, 4ull, 5ull}) {
    CHECK(distance(placed.at(v), {5.0, 5.0}) <= rho);
  }
}

TEST_CASE("linked vertices stay on the segment between their suns") {
  // two systems with a moon-moon contact: every interpolant lies on s-t
  const Graph g = Graph::from_edges(std::vector<std::pair<VertexId, VertexId>>{
      {1, 10}, {10, 20}, {20, 21}, {21, 11}, {11, 2}});
  PhaseRunner r(1, 1);
  auto c = coarsen_with_suns(g, {1, 2}, r);
  Layout coarse;
  coarse.set(1, {0.0, 0.0});
  coarse.set(2, {10.0, 0.0});
  const Layout placed = place_level(g, c.attrs, c.links, c.next.graph, coarse, 0, r);
  for (VertexId v : {10ull, 20ull, 21ull, 11ull}) {
    CHECK(placed.at(v).y == doctest::Approx(0.0));
    CHECK(placed.at(v).x > 0.0);
    CHECK(placed.at(v).x < 10.0);
  }
  CHECK(placed.at(10).x < placed.at(20).x);
  CHECK(placed.at(20).x < placed.at(21).x);
  CHECK(placed.at(21).x < placed.at(11).x);
}

TEST_CASE("placement is total on protocol-built levels") {
  const Graph g = tg::random_connected(150, 260, 4);
  PhaseRunner r(1, 9);
  auto states = make_initial_states(g, 0);
  coarsen_level(g, states, 0.2, r);
  const auto attrs = extract_attrs(states);
  const auto links = extract_links(states);
  const NextLevel next = build_next_level(g, states);

  Layout coarse;
  SplitMix64 rng(3);
  for (VertexId id : next.graph.ids()) coarse.set(id, {rng.next_in(0, 20), rng.next_in(0, 20)});
  const Layout placed = place_level(g, attrs, links, next.graph, coarse, 5, r);
  CHECK(placed.size() == g.vertex_count());
  CHECK(placed.covers(g));
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    if (attrs[i].state == VertexState::sun)
      CHECK(placed.at(attrs[i].id) == coarse.at(attrs[i].id));
  }
}

TEST_CASE("a missing coarse position is reported") {
  const Graph g = tg::path(5);
  PhaseRunner r(1, 1);
  auto c = coarsen_with_suns(g, {3}, r);
  Layout empty;
  CHECK_THROWS_AS(place_level(g, c.attrs, c.links, c.next.graph, empty, 0, r),
                  MissingCoarsePosition);
}
