#include "mlgd/partition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace mlgd {

PartitionMap partition(const Graph& g, const PartitionConfig& cfg) {
  if (cfg.parts < 1) throw std::invalid_argument("partition: parts must be positive");
  if (cfg.epsilon <= 0.0) throw std::invalid_argument("partition: epsilon must be positive");

  const std::size_t n = g.vertex_count();
  const int P = cfg.parts;
  PartitionMap pm;
  pm.parts = P;

  std::vector<int> label(n, 0);
  if (P > 1 && n > 0) {
    // Hash-ordered round-robin start: random-looking but exactly balanced.
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::vector<std::uint64_t> key(n);
    for (std::uint32_t i = 0; i < n; ++i) key[i] = mix64(cfg.seed, g.id_at(i));
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return key[a] != key[b] ? key[a] < key[b] : g.id_at(a) < g.id_at(b);
    });
    for (std::size_t j = 0; j < n; ++j) label[order[j]] = static_cast<int>(j % P);

    const double cap_real = (1.0 + cfg.epsilon) * std::ceil(static_cast<double>(n) / P);
    const std::size_t capacity =
        std::max<std::size_t>(static_cast<std::size_t>(cap_real), (n + P - 1) / P);

    std::vector<std::size_t> load(P, 0);
    for (int l : label) ++load[l];

    std::vector<int> desired(n);
    std::vector<double> count(P, 0.0);
    std::vector<int> seen;
    for (int round = 0; round < cfg.rounds; ++round) {
      const std::vector<int> snapshot = label;
      const std::vector<std::size_t> load_snap = load;

      // Desired label per vertex, from the synchronous snapshot. Score is
      // (neighbor count) * (1 - load/capacity); the raw count breaks penalty
      // ties, then the smaller label. A vertex moves only if the winner beats
      // its current label strictly.
      auto scored = [&](int l) {
        const double penalty =
            1.0 - static_cast<double>(load_snap[l]) / static_cast<double>(capacity);
        return std::make_tuple(count[l] * penalty, count[l], -l);
      };
      for (std::uint32_t v = 0; v < n; ++v) {
        seen.clear();
        for (const auto& nb : g.neighbors(v)) {
          const int l = snapshot[nb.index];
          if (count[l] == 0.0) seen.push_back(l);
          count[l] += 1.0;
        }
        desired[v] = label[v];
        if (!seen.empty()) {
          int best = label[v];
          auto best_score = scored(label[v]);
          for (int l : seen) {
            if (l == label[v]) continue;
            const auto sc = scored(l);
            if (sc > best_score) {
              best_score = sc;
              best = l;
            }
          }
          desired[v] = best;
        }
        for (int l : seen) count[l] = 0.0;
      }

      // Apply phase, in vertex order. Opposite moves pair up as atomic swaps
      // (loads untouched), so balance holds mid-round; the unmatched rest
      // goes through only while the target has spare capacity.
      std::map<std::pair<int, int>, std::deque<std::uint32_t>> pending;
      for (std::uint32_t v = 0; v < n; ++v) {
        if (desired[v] == label[v]) continue;
        const int from = label[v];
        const int to = desired[v];
        auto rev = pending.find({to, from});
        if (rev != pending.end() && !rev->second.empty()) {
          const std::uint32_t w = rev->second.front();
          rev->second.pop_front();
          label[w] = from;
          label[v] = to;
        } else {
          pending[{from, to}].push_back(v);
        }
      }
      std::vector<std::pair<std::uint32_t, int>> rest;
      for (const auto& [fromto, queue] : pending)
        for (std::uint32_t v : queue) rest.emplace_back(v, fromto.second);
      std::sort(rest.begin(), rest.end());
      for (const auto& [v, to] : rest) {
        if (load[to] < capacity) {
          --load[label[v]];
          ++load[to];
          label[v] = to;
        }
      }
    }
  }

  pm.assignment.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) pm.assignment.emplace(g.id_at(i), label[i]);
  return pm;
}

std::int64_t cut_edges(const Graph& g, const PartitionMap& pm) {
  std::int64_t cut = 0;
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    const int li = pm.assignment.at(g.id_at(i));
    for (const auto& nb : g.neighbors(i)) {
      if (g.id_at(i) < nb.id && pm.assignment.at(nb.id) != li) ++cut;
    }
  }
  return cut;
}

}  // namespace mlgd
