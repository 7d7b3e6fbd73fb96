#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mlgd/graph.hpp"
#include "mlgd/types.hpp"

namespace mlgd::bsp {

/// Raised when a vertex program addresses a message to a vertex it is not
/// adjacent to. Multi-hop delivery goes through the relay convention: wrap
/// the payload in an envelope message addressed to a neighbor, which forwards
/// it with a plain send the next superstep.
class MessageToNonNeighbor : public std::runtime_error {
 public:
  MessageToNonNeighbor(VertexId from, VertexId to)
      : std::runtime_error("vertex " + std::to_string(from) + " sent to non-neighbor " +
                           std::to_string(to)),
        from(from),
        to(to) {}
  VertexId from;
  VertexId to;
};

struct EngineConfig {
  int num_workers = 1;
  int max_supersteps = 1'000'000;
  /// Vertex id -> worker index in [0, num_workers). Empty means round-robin
  /// over dense indices. Must cover every vertex when present.
  std::unordered_map<VertexId, int> partition_map;
  std::uint64_t seed = 0;
  /// Stress mode: delivers each inbox in a seeded random order instead of
  /// (sender, emission) order. Programs are required to be order-insensitive;
  /// tests flip this on to prove it.
  bool shuffle_inboxes = false;
};

struct RunStats {
  int supersteps_executed = 0;
  /// True when the run was cut off by max_supersteps with work still pending.
  bool hit_cap = false;
  std::vector<std::int64_t> messages_per_superstep;
  /// Semantic message sizes (what the protocol transmits, not machine bytes).
  std::vector<std::int64_t> bytes_per_superstep;
  /// Largest per-vertex state observed in each superstep.
  std::vector<std::size_t> max_state_bytes_per_superstep;

  std::int64_t total_messages() const {
    std::int64_t s = 0;
    for (auto m : messages_per_superstep) s += m;
    return s;
  }
};

template <typename Msg>
struct Envelope {
  VertexId sender;
  std::uint32_t seq;  // emission order within (sender, superstep)
  Msg payload;
};

enum class AggregateOp { sum, min, max };

namespace detail {

template <typename Msg>
struct Outbox {
  // One shard per destination worker; flushed at the superstep barrier.
  std::vector<std::vector<std::pair<std::uint32_t, Envelope<Msg>>>> shards;
  std::int64_t messages = 0;
  std::int64_t bytes = 0;
  std::size_t max_state = 0;
  bool any_active = false;
  std::exception_ptr error;

  struct AggWrite {
    std::string name;
    AggregateOp op;
    std::uint32_t vertex;
    std::uint32_t seq;
    double value;
  };
  std::vector<AggWrite> agg_writes;

  void reset_counters() {
    messages = 0;
    bytes = 0;
    max_state = 0;
    any_active = false;
    agg_writes.clear();
  }
};

class WorkerPool {
 public:
  explicit WorkerPool(int n) : n_(n) {
    threads_.reserve(n);
    for (int i = 0; i < n; ++i) threads_.emplace_back([this, i] { loop(i); });
  }
  WorkerPool(const WorkerPool&) = delete;
  ~WorkerPool() {
    {
      std::lock_guard lk(m_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void run(const std::function<void(int)>& task) {
    {
      std::lock_guard lk(m_);
      task_ = &task;
      ++generation_;
      done_ = 0;
    }
    cv_.notify_all();
    std::unique_lock lk(m_);
    done_cv_.wait(lk, [this] { return done_ == n_; });
    task_ = nullptr;
  }

 private:
  void loop(int id) {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(int)>* task = nullptr;
      {
        std::unique_lock lk(m_);
        cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        task = task_;
      }
      (*task)(id);
      {
        std::lock_guard lk(m_);
        if (++done_ == n_) done_cv_.notify_all();
      }
    }
  }

  int n_;
  std::mutex m_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  const std::function<void(int)>* task_ = nullptr;
  std::uint64_t generation_ = 0;
  int done_ = 0;
  bool stop_ = false;
  std::vector<std::thread> threads_;
};

}  // namespace detail

template <typename Program>
class Context {
 public:
  using State = typename Program::State;
  using Msg = typename Program::Message;

  Context(const Graph& g, std::uint32_t index, int superstep, State* state,
          std::span<const Envelope<Msg>> inbox, std::uint8_t* active,
          detail::Outbox<Msg>* out, const std::vector<int>* worker_of, std::uint64_t seed,
          const std::map<std::string, double, std::less<>>* prev_aggregates)
      : graph_(g),
        index_(index),
        id_(g.id_at(index)),
        superstep_(superstep),
        state_(state),
        inbox_(inbox),
        active_(active),
        out_(out),
        worker_of_(worker_of),
        rng_(mix64(seed, id_, static_cast<std::uint64_t>(superstep))),
        prev_aggregates_(prev_aggregates) {}

  VertexId id() const { return id_; }
  std::uint32_t index() const { return index_; }
  int superstep() const { return superstep_; }

  State& state() { return *state_; }
  const State& state() const { return *state_; }

  /// Messages addressed to this vertex in the previous superstep, ordered by
  /// (sender id, emission order) unless inbox shuffling is enabled.
  std::span<const Envelope<Msg>> inbox() const { return inbox_; }

  std::span<const Graph::Neighbor> neighbors() const { return graph_.neighbors(index_); }
  std::size_t degree() const { return graph_.degree(index_); }

  /// Queues a message for delivery at superstep() + 1. The target must be
  /// adjacent; anything else throws MessageToNonNeighbor.
  void send(VertexId target, Msg msg) {
    const Graph::Neighbor* nb = graph_.find_neighbor(index_, target);
    if (nb == nullptr) throw MessageToNonNeighbor(id_, target);
    push(nb->index, std::move(msg));
  }

  void send_to_neighbors(const Msg& msg) {
    for (const auto& nb : graph_.neighbors(index_)) push(nb.index, msg);
  }

  void vote_to_halt() { *active_ = 0; }

  /// Deterministic per-(vertex, superstep) stream; identical for any worker
  /// count.
  SplitMix64& rng() { return rng_; }

  /// Aggregate view: values written during the previous superstep.
  double aggregate(std::string_view name, double fallback = 0.0) const {
    auto it = prev_aggregates_->find(name);
    return it == prev_aggregates_->end() ? fallback : it->second;
  }

  /// Contributes to a named aggregate, visible from the next superstep on.
  void aggregate(std::string_view name, double value, AggregateOp op) {
    out_->agg_writes.push_back(
        {std::string(name), op, index_, agg_seq_++, value});
  }

 private:
  void push(std::uint32_t target_index, Msg msg) {
    ++out_->messages;
    if constexpr (requires(const Msg& m) {
                    { Program::message_size(m) } -> std::convertible_to<std::size_t>;
                  }) {
      out_->bytes += static_cast<std::int64_t>(Program::message_size(msg));
    } else {
      out_->bytes += static_cast<std::int64_t>(sizeof(Msg));
    }
    out_->shards[static_cast<std::size_t>((*worker_of_)[target_index])].emplace_back(
        target_index, Envelope<Msg>{id_, seq_++, std::move(msg)});
  }

  const Graph& graph_;
  std::uint32_t index_;
  VertexId id_;
  int superstep_;
  State* state_;
  std::span<const Envelope<Msg>> inbox_;
  std::uint8_t* active_;
  detail::Outbox<Msg>* out_;
  const std::vector<int>* worker_of_;
  SplitMix64 rng_;
  const std::map<std::string, double, std::less<>>* prev_aggregates_;
  std::uint32_t seq_ = 0;
  std::uint32_t agg_seq_ = 0;
};

template <typename P>
concept VertexProgram = requires(P p, Context<P>& ctx) {
  typename P::State;
  typename P::Message;
  p.compute(ctx);
};

template <typename Program>
struct RunResult {
  /// Final state per dense graph index (position i belongs to g.ids()[i]).
  std::vector<typename Program::State> states;
  RunStats stats;
};

/// Runs `program` over `g` superstep-synchronously until every vertex has
/// halted with an empty inbox, or the superstep cap is reached (then
/// stats.hit_cap is set and the partial state returned). The result is
/// identical for any worker count given the same seed.
template <VertexProgram Program>
RunResult<Program> run(const Graph& g, Program& program,
                       std::vector<typename Program::State> init_states,
                       const EngineConfig& cfg) {
  using State = typename Program::State;
  using Msg = typename Program::Message;

  if (g.empty()) throw std::invalid_argument("bsp::run: empty graph");
  if (cfg.num_workers < 1) throw std::invalid_argument("bsp::run: num_workers must be positive");
  if (cfg.max_supersteps < 1)
    throw std::invalid_argument("bsp::run: max_supersteps must be positive");
  const std::size_t n = g.vertex_count();
  if (init_states.size() != n)
    throw std::invalid_argument("bsp::run: init state size does not match graph");

  const int W = cfg.num_workers;
  std::vector<int> worker_of(n);
  if (cfg.partition_map.empty()) {
    for (std::size_t i = 0; i < n; ++i) worker_of[i] = static_cast<int>(i % W);
  } else {
    if (cfg.partition_map.size() != n)
      throw std::invalid_argument("bsp::run: partition map must cover every vertex exactly once");
    for (std::size_t i = 0; i < n; ++i) {
      auto it = cfg.partition_map.find(g.id_at(static_cast<std::uint32_t>(i)));
      if (it == cfg.partition_map.end())
        throw std::invalid_argument("bsp::run: partition map missing vertex " +
                                    std::to_string(g.id_at(static_cast<std::uint32_t>(i))));
      if (it->second < 0 || it->second >= W)
        throw std::invalid_argument("bsp::run: partition map worker index out of range");
      worker_of[i] = it->second;
    }
  }

  std::vector<std::vector<std::uint32_t>> owned(W);
  for (std::size_t i = 0; i < n; ++i)
    owned[worker_of[i]].push_back(static_cast<std::uint32_t>(i));

  std::vector<State> states = std::move(init_states);
  std::vector<std::uint8_t> active(n, 1);
  std::vector<std::vector<Envelope<Msg>>> inbox_cur(n);
  std::vector<std::vector<Envelope<Msg>>> inbox_next(n);

  std::vector<detail::Outbox<Msg>> outboxes(W);
  for (auto& ob : outboxes) ob.shards.resize(W);

  std::map<std::string, double, std::less<>> prev_aggregates;

  std::unique_ptr<detail::WorkerPool> pool;
  if (W > 1) pool = std::make_unique<detail::WorkerPool>(W);
  auto parallel = [&](const std::function<void(int)>& fn) {
    if (W == 1)
      fn(0);
    else
      pool->run(fn);
  };

  RunStats stats;
  bool done = false;

  for (int t = 0; t < cfg.max_supersteps && !done; ++t) {
    for (auto& ob : outboxes) ob.reset_counters();

    parallel([&](int w) {
      auto& ob = outboxes[w];
      try {
        for (std::uint32_t v : owned[w]) {
          if (!inbox_cur[v].empty()) active[v] = 1;  // message reactivates
          if (active[v]) {
            Context<Program> ctx(g, v, t, &states[v], inbox_cur[v], &active[v], &ob,
                                 &worker_of, cfg.seed, &prev_aggregates);
            program.compute(ctx);
          }
          std::size_t sz;
          if constexpr (requires(const State& s) {
                          { Program::state_size(s) } -> std::convertible_to<std::size_t>;
                        }) {
            sz = Program::state_size(states[v]);
          } else {
            sz = sizeof(State);
          }
          ob.max_state = std::max(ob.max_state, sz);
          ob.any_active = ob.any_active || active[v] != 0;
        }
      } catch (...) {
        ob.error = std::current_exception();
      }
    });

    for (auto& ob : outboxes)
      if (ob.error) std::rethrow_exception(ob.error);

    stats.supersteps_executed = t + 1;
    std::int64_t msgs = 0, bytes = 0;
    std::size_t max_state = 0;
    bool any_active = false;
    for (auto& ob : outboxes) {
      msgs += ob.messages;
      bytes += ob.bytes;
      max_state = std::max(max_state, ob.max_state);
      any_active = any_active || ob.any_active;
    }
    stats.messages_per_superstep.push_back(msgs);
    stats.bytes_per_superstep.push_back(bytes);
    stats.max_state_bytes_per_superstep.push_back(max_state);

    // Aggregates written in superstep t become readable in t+1. The fold is
    // ordered by (name, vertex, emission) so the result never depends on the
    // worker layout.
    {
      std::vector<typename detail::Outbox<Msg>::AggWrite> writes;
      for (auto& ob : outboxes)
        for (auto& aw : ob.agg_writes) writes.push_back(std::move(aw));
      std::sort(writes.begin(), writes.end(), [](const auto& a, const auto& b) {
        return std::tie(a.name, a.vertex, a.seq) < std::tie(b.name, b.vertex, b.seq);
      });
      prev_aggregates.clear();
      std::map<std::string, AggregateOp, std::less<>> ops;
      for (const auto& aw : writes) {
        auto [it, fresh] = prev_aggregates.try_emplace(aw.name, aw.value);
        auto [op_it, op_fresh] = ops.try_emplace(aw.name, aw.op);
        if (!op_fresh && op_it->second != aw.op)
          throw std::logic_error("bsp::run: conflicting ops for aggregate " + aw.name);
        if (fresh) continue;
        switch (aw.op) {
          case AggregateOp::sum: it->second += aw.value; break;
          case AggregateOp::min: it->second = std::min(it->second, aw.value); break;
          case AggregateOp::max: it->second = std::max(it->second, aw.value); break;
        }
      }
    }

    parallel([&](int tw) {
      for (std::uint32_t v : owned[tw]) inbox_next[v].clear();
      for (int w = 0; w < W; ++w) {
        auto& shard = outboxes[w].shards[tw];
        for (auto& [target, env] : shard) inbox_next[target].push_back(std::move(env));
        shard.clear();
      }
      for (std::uint32_t v : owned[tw]) {
        auto& ib = inbox_next[v];
        if (ib.size() > 1) {
          std::sort(ib.begin(), ib.end(), [](const Envelope<Msg>& a, const Envelope<Msg>& b) {
            return a.sender != b.sender ? a.sender < b.sender : a.seq < b.seq;
          });
          if (cfg.shuffle_inboxes) {
            SplitMix64 r(mix64(cfg.seed ^ 0x7368756666ULL, g.id_at(v),
                               static_cast<std::uint64_t>(t)));
            for (std::size_t i = ib.size() - 1; i > 0; --i)
              std::swap(ib[i], ib[r.next_below(i + 1)]);
          }
        }
      }
    });

    std::swap(inbox_cur, inbox_next);
    if (!any_active && msgs == 0) done = true;
  }

  stats.hit_cap = !done;
  return {std::move(states), std::move(stats)};
}

}  // namespace mlgd::bsp
