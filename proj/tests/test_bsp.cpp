#include <doctest.h>

#include <numeric>
#include <variant>

#include "mlgd/bsp.hpp"
#include "mlgd/messages.hpp"
#include "support/generators.hpp"

using namespace mlgd;
namespace tg = mlgd::testing;

namespace {

struct HaltNow {
  using State = int;
  using Message = int;
  void compute(bsp::Context<HaltNow>& ctx) { ctx.vote_to_halt(); }
};

// Sends its id to all neighbors in superstep 0, halts afterwards.
struct EchoOnce {
  using State = int;
  using Message = VertexId;
  void compute(bsp::Context<EchoOnce>& ctx) {
    if (ctx.superstep() == 0) ctx.send_to_neighbors(ctx.id());
    ctx.vote_to_halt();
  }
};

struct DegreeCount {
  using State = int;
  using Message = VertexId;
  void compute(bsp::Context<DegreeCount>& ctx) {
    if (ctx.superstep() == 0) {
      ctx.send_to_neighbors(ctx.id());
    } else {
      ctx.state() = static_cast<int>(ctx.inbox().size());
    }
    ctx.vote_to_halt();
  }
};

}  // namespace

TEST_CASE("a program that halts immediately runs exactly one superstep") {
  const Graph g = tg::path(3);
  HaltNow prog;
  auto res = bsp::run(g, prog, std::vector<int>(3, 0), {});
  CHECK(res.stats.supersteps_executed == 1);
  REQUIRE(res.stats.messages_per_superstep.size() == 1);
  CHECK(res.stats.messages_per_superstep[0] == 0);
  CHECK_FALSE(res.stats.hit_cap);
}

TEST_CASE("echo-once on a triangle sends six messages then drains") {
  const Graph g = tg::cycle(3);
  EchoOnce prog;
  auto res = bsp::run(g, prog, std::vector<int>(3, 0), {});
  CHECK(res.stats.supersteps_executed == 2);
  CHECK(res.stats.messages_per_superstep == std::vector<std::int64_t>{6, 0});
}

TEST_CASE("degree counting on the karate club") {
  const Graph g = tg::karate_club();
  REQUIRE(g.vertex_count() == 34);
  REQUIRE(g.edge_count() == 78);
  DegreeCount prog;
  auto res = bsp::run(g, prog, std::vector<int>(34, -1), {});
  CHECK(res.stats.messages_per_superstep[0] == 156);  // 2m
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i)
    CHECK(res.states[i] == static_cast<int>(g.degree(i)));
}

namespace {

// Asserts synchronous delivery: nothing readable in the emitting superstep.
struct DeliveryProbe {
  using State = int;  // superstep the message arrived in
  using Message = int;
  void compute(bsp::Context<DeliveryProbe>& ctx) {
    if (ctx.superstep() == 0) {
      CHECK(ctx.inbox().empty());
      if (ctx.id() == 1) ctx.send(2, 42);
      ctx.vote_to_halt();
      return;
    }
    if (!ctx.inbox().empty()) ctx.state() = ctx.superstep();
    ctx.vote_to_halt();
  }
};

}  // namespace

TEST_CASE("messages sent at superstep t arrive exactly at t+1") {
  const Graph g = tg::path(3);  // 1-2-3
  DeliveryProbe prog;
  auto res = bsp::run(g, prog, std::vector<int>(3, -1), {});
  CHECK(res.states[g.index_of(2)] == 1);
  CHECK(res.states[g.index_of(1)] == -1);
}

namespace {

// Two-hop relay using the shared protocol message type: 1 wraps a payload for
// 3, neighbor 2 forwards it.
struct RelayProbe {
  using State = int;  // superstep the payload arrived in
  using Message = mlgd::Message;
  static std::size_t message_size(const Message& m) { return mlgd::message_size(m); }
  void compute(bsp::Context<RelayProbe>& ctx) {
    if (ctx.superstep() == 0 && ctx.id() == 1) {
      ctx.send(2, Message(two_hop(3, Offer{ctx.id()})));
    }
    for (const auto& env : ctx.inbox()) {
      if (const auto* th = std::get_if<TwoHop>(&env.payload)) {
        ctx.send(th->final_target, th->payload->msg);
      } else {
        ctx.state() = ctx.superstep();
      }
    }
    ctx.vote_to_halt();
  }
};

}  // namespace

TEST_CASE("two-hop payloads arrive two supersteps after emission") {
  const Graph g = tg::path(3);
  RelayProbe prog;
  auto res = bsp::run(g, prog, std::vector<int>(3, -1), {});
  CHECK(res.states[g.index_of(3)] == 2);
}

namespace {

struct BadSend {
  using State = int;
  using Message = int;
  void compute(bsp::Context<BadSend>& ctx) {
    if (ctx.id() == 1) ctx.send(3, 7);  // distance 2 on a path
    ctx.vote_to_halt();
  }
};

}  // namespace

TEST_CASE("direct sends to non-neighbors fault") {
  const Graph g = tg::path(3);
  BadSend prog;
  CHECK_THROWS_AS(bsp::run(g, prog, std::vector<int>(3, 0), {}),
                  bsp::MessageToNonNeighbor);
}

namespace {

// Counts invocations; vertex 1 pings vertex 2 once at superstep 2.
struct WakeProbe {
  using State = int;  // number of times compute ran
  using Message = int;
  void compute(bsp::Context<WakeProbe>& ctx) {
    ++ctx.state();
    if (ctx.id() == 1) {
      if (ctx.superstep() == 2) ctx.send(2, 1);
      if (ctx.superstep() <= 2) return;  // stays active to reach superstep 2
    }
    ctx.vote_to_halt();
  }
};

}  // namespace

TEST_CASE("halted vertices wake only for messages") {
  const Graph g = tg::path(3);
  WakeProbe prog;
  auto res = bsp::run(g, prog, std::vector<int>(3, 0), {});
  CHECK(res.states[g.index_of(1)] == 4);  // supersteps 0..3
  CHECK(res.states[g.index_of(2)] == 2);  // superstep 0 + the wake-up at 3
  CHECK(res.states[g.index_of(3)] == 1);  // superstep 0 only, never again
}

namespace {

struct PingForever {
  using State = int;
  using Message = int;
  void compute(bsp::Context<PingForever>& ctx) {
    if (ctx.id() == 1 || !ctx.inbox().empty())
      ctx.send(ctx.id() == 1 ? 2 : 1, 0);
    ctx.vote_to_halt();
  }
};

}  // namespace

TEST_CASE("the superstep cap returns partial state with a flag") {
  const Graph g = tg::path(2);
  PingForever prog;
  bsp::EngineConfig cfg;
  cfg.max_supersteps = 5;
  auto res = bsp::run(g, prog, std::vector<int>(2, 0), cfg);
  CHECK(res.stats.hit_cap);
  CHECK(res.stats.supersteps_executed == 5);
  CHECK(res.stats.messages_per_superstep.size() == 5);
}

namespace {

// Order-sensitive on purpose: records the exact inbox sequence.
struct OrderProbe {
  using State = std::vector<std::pair<VertexId, int>>;
  using Message = int;
  void compute(bsp::Context<OrderProbe>& ctx) {
    if (ctx.superstep() == 0) {
      // everyone sends two numbered messages to vertex 1
      if (ctx.id() != 1) {
        ctx.send(1, 10);
        ctx.send(1, 11);
      }
    } else {
      for (const auto& env : ctx.inbox()) ctx.state().emplace_back(env.sender, env.payload);
    }
    ctx.vote_to_halt();
  }
};

}  // namespace

TEST_CASE("inboxes are ordered by sender then emission order") {
  OrderProbe prog;
  const Graph h = Graph::from_edges(
      std::vector<std::pair<VertexId, VertexId>>{{1, 5}, {1, 3}, {1, 9}});
  auto res = bsp::run(h, prog, std::vector<OrderProbe::State>(h.vertex_count()), {});
  const auto& got = res.states[h.index_of(1)];
  REQUIRE(got.size() == 6);
  const std::vector<std::pair<VertexId, int>> want{{3, 10}, {3, 11}, {5, 10},
                                                   {5, 11}, {9, 10}, {9, 11}};
  CHECK(got == want);
}

namespace {

// Deterministic but rng-using program with an order-insensitive fold.
struct MixProbe {
  using State = double;
  using Message = double;
  void compute(bsp::Context<MixProbe>& ctx) {
    if (ctx.superstep() < 3) {
      ctx.send_to_neighbors(ctx.rng().next_double() + ctx.state());
    }
    double lo = 0.0, hi = 0.0;
    for (const auto& env : ctx.inbox()) {
      lo = std::min(lo, env.payload);
      hi = std::max(hi, env.payload);
    }
    ctx.state() += hi - lo;
    ctx.vote_to_halt();
  }
};

}  // namespace

TEST_CASE("results are bit-identical for 1, 2, 4, and 8 workers") {
  const Graph g = tg::grid(8, 8);
  std::vector<double> reference;
  for (int workers : {1, 2, 4, 8}) {
    MixProbe prog;
    bsp::EngineConfig cfg;
    cfg.num_workers = workers;
    cfg.seed = 1234;
    auto res = bsp::run(g, prog, std::vector<double>(g.vertex_count(), 0.5), cfg);
    if (reference.empty()) {
      reference = res.states;
    } else {
      CHECK(res.states == reference);
    }
  }
}

TEST_CASE("order-insensitive programs survive seeded inbox shuffling") {
  const Graph g = tg::grid(6, 6);
  std::vector<double> plain, shuffled;
  {
    MixProbe prog;
    bsp::EngineConfig cfg;
    cfg.seed = 5;
    plain = bsp::run(g, prog, std::vector<double>(g.vertex_count(), 0.0), cfg).states;
  }
  {
    MixProbe prog;
    bsp::EngineConfig cfg;
    cfg.seed = 5;
    cfg.shuffle_inboxes = true;
    shuffled = bsp::run(g, prog, std::vector<double>(g.vertex_count(), 0.0), cfg).states;
  }
  CHECK(plain == shuffled);
}

namespace {

struct AggProbe {
  using State = std::vector<double>;  // aggregate view per superstep
  using Message = int;
  void compute(bsp::Context<AggProbe>& ctx) {
    ctx.state().push_back(ctx.aggregate("total", -1.0));
    if (ctx.superstep() == 0) ctx.aggregate("total", 1.0, bsp::AggregateOp::sum);
    if (ctx.superstep() < 2) {
      if (ctx.id() == 1) ctx.send(2, 0);  // keep the run alive two more steps
      return;
    }
    ctx.vote_to_halt();
  }
};

}  // namespace

TEST_CASE("aggregates written in superstep t are visible in t+1 only") {
  const Graph g = tg::path(2);
  AggProbe prog;
  auto res = bsp::run(g, prog, std::vector<AggProbe::State>(2), {});
  const auto& views = res.states[g.index_of(1)];
  REQUIRE(views.size() >= 3);
  CHECK(views[0] == -1.0);  // nothing written yet
  CHECK(views[1] == 2.0);   // both vertices contributed in superstep 0
  CHECK(views[2] == -1.0);  // aggregates are per-superstep, not cumulative
}

namespace {

struct SizedMsg {
  using State = std::vector<int>;
  using Message = int;
  static std::size_t message_size(const Message&) { return 100; }
  static std::size_t state_size(const State& s) { return s.size(); }
  void compute(bsp::Context<SizedMsg>& ctx) {
    if (ctx.superstep() == 0 && ctx.id() == 1) {
      ctx.send(2, 1);
      ctx.send(2, 2);
      ctx.state().resize(17);
    }
    ctx.vote_to_halt();
  }
};

}  // namespace

TEST_CASE("message and state accounting uses the semantic sizes") {
  const Graph g = tg::path(2);
  SizedMsg prog;
  auto res = bsp::run(g, prog, std::vector<SizedMsg::State>(2), {});
  CHECK(res.stats.messages_per_superstep[0] == 2);
  CHECK(res.stats.bytes_per_superstep[0] == 200);
  CHECK(res.stats.max_state_bytes_per_superstep[0] == 17);
}

TEST_CASE("partition maps must cover every vertex with a valid worker") {
  const Graph g = tg::path(3);
  HaltNow prog;
  bsp::EngineConfig cfg;
  cfg.num_workers = 2;
  cfg.partition_map = {{1, 0}, {2, 1}};  // vertex 3 missing
  CHECK_THROWS_AS(bsp::run(g, prog, std::vector<int>(3, 0), cfg), std::invalid_argument);
  cfg.partition_map = {{1, 0}, {2, 1}, {3, 2}};  // worker index out of range
  CHECK_THROWS_AS(bsp::run(g, prog, std::vector<int>(3, 0), cfg), std::invalid_argument);
  cfg.partition_map = {{1, 0}, {2, 1}, {3, 1}};
  auto res = bsp::run(g, prog, std::vector<int>(3, 0), cfg);
  CHECK(res.stats.supersteps_executed == 1);
}
