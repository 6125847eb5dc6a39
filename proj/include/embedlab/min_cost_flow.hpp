#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "embedlab/error.hpp"

namespace embedlab {

// Successive shortest paths with Bellman-Ford (queue-based) path search.
// Works for any ordered field type, so exact rationals give exact optima.
// Capacities are finite or "unbounded"; negative cycles are not allowed in
// the input network.
template <class Value>
class MinCostFlow {
 public:
  struct Edge {
    std::size_t from;
    std::size_t to;
    Value capacity;  // ignored when unbounded
    Value cost;
    Value flow{};
    bool unbounded = false;
  };

  explicit MinCostFlow(std::size_t nodes) : adj_(nodes) {}

  std::size_t add_edge(std::size_t from, std::size_t to, Value capacity, Value cost) {
    return push_pair(from, to, std::move(capacity), std::move(cost), false);
  }

  std::size_t add_unbounded_edge(std::size_t from, std::size_t to, Value cost) {
    return push_pair(from, to, Value{}, std::move(cost), true);
  }

  std::size_t node_count() const { return adj_.size(); }
  const Edge& edge(std::size_t id) const { return edges_[id]; }

  // Sends `amount` from source to sink at minimum cost. Throws Infeasible if
  // the network cannot carry it. Returns the total cost.
  Value solve(std::size_t source, std::size_t sink, const Value& amount) {
    Value sent{};
    total_cost_ = Value{};
    while (sent < amount) {
      std::vector<std::optional<Value>> dist;
      std::vector<std::size_t> parent;
      shortest_paths(source, dist, parent);
      if (!dist[sink])
        throw Error(ErrorKind::Infeasible, "flow network cannot route the required amount");
      Value push = amount - sent;
      for (std::size_t v = sink; v != source;) {
        const std::size_t e = parent[v];
        if (!is_unbounded(e)) {
          Value room = residual(e);
          if (room < push) push = room;
        }
        v = edges_[e].from;
      }
      for (std::size_t v = sink; v != source;) {
        const std::size_t e = parent[v];
        edges_[e].flow += push;
        edges_[e ^ 1].flow -= push;
        v = edges_[e].from;
      }
      sent += push;
      total_cost_ += push * *dist[sink];
    }
    return total_cost_;
  }

  const Value& total_cost() const { return total_cost_; }

  // Node potentials on the final residual graph: shortest distances from a
  // virtual root joined to every node by a zero-cost arc. They satisfy
  // pi(to) <= pi(from) + cost on every residual arc.
  std::vector<Value> potentials() const {
    std::vector<std::optional<Value>> dist(adj_.size(), Value{});
    std::vector<std::size_t> parent(adj_.size());
    const auto all = index_sequence();
    relax_all(dist, parent, std::deque<std::size_t>(all.begin(), all.end()));
    std::vector<Value> out;
    out.reserve(dist.size());
    for (auto& d : dist) out.push_back(*d);
    return out;
  }

 private:
  bool is_unbounded(std::size_t e) const {
    return e % 2 == 0 && edges_[e].unbounded;
  }

  Value residual(std::size_t e) const {
    const Edge& ed = edges_[e];
    if (e % 2 == 0) return ed.capacity - ed.flow;
    return -ed.flow;  // reverse arc: undo forward flow
  }

  bool has_residual(std::size_t e) const {
    return is_unbounded(e) || residual(e) > Value{};
  }

  std::size_t push_pair(std::size_t from, std::size_t to, Value capacity, Value cost,
                        bool unbounded) {
    if (from >= adj_.size() || to >= adj_.size())
      throw Error(ErrorKind::Domain, "edge endpoint out of range");
    const std::size_t id = edges_.size();
    Value reverse_cost = -cost;
    edges_.push_back(Edge{from, to, capacity, std::move(cost), Value{}, unbounded});
    edges_.push_back(Edge{to, from, Value{}, std::move(reverse_cost), Value{}, false});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    return id;
  }

  std::vector<std::size_t> index_sequence() const {
    std::vector<std::size_t> all(adj_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }

  void shortest_paths(std::size_t source, std::vector<std::optional<Value>>& dist,
                      std::vector<std::size_t>& parent) const {
    dist.assign(adj_.size(), std::nullopt);
    parent.assign(adj_.size(), 0);
    dist[source] = Value{};
    relax_all(dist, parent, std::deque<std::size_t>{source});
  }

  void relax_all(std::vector<std::optional<Value>>& dist, std::vector<std::size_t>& parent,
                 std::deque<std::size_t> queue) const {
    std::vector<char> queued(adj_.size(), 0);
    std::vector<std::size_t> relax_count(adj_.size(), 0);
    for (std::size_t v : queue) queued[v] = 1;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      queued[u] = 0;
      for (std::size_t e : adj_[u]) {
        if (!has_residual(e)) continue;
        const Edge& ed = edges_[e];
        Value candidate = *dist[u] + ed.cost;
        if (dist[ed.to] && !(candidate < *dist[ed.to])) continue;
        dist[ed.to] = std::move(candidate);
        parent[ed.to] = e;
        if (++relax_count[ed.to] > adj_.size())
          throw Error(ErrorKind::Infeasible, "negative cycle in residual network");
        if (!queued[ed.to]) {
          queued[ed.to] = 1;
          queue.push_back(ed.to);
        }
      }
    }
  }

  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adj_;
  Value total_cost_{};
};

template <class Value>
struct TransportArc {
  std::size_t supply;  // index into the supply list
  std::size_t demand;  // index into the demand list
  Value mass;
};

template <class Value>
struct TransportSolution {
  Value cost{};
  std::vector<TransportArc<Value>> arcs;
  // Dual prices with supply_price[i] - demand_price[j] <= cost(i, j),
  // tight on every arc that carries mass.
  std::vector<Value> supply_price;
  std::vector<Value> demand_price;
};

// Balanced transportation problem on the complete bipartite graph.
template <class Value>
TransportSolution<Value> solve_transport(std::span<const Value> supply,
                                         std::span<const Value> demand,
                                         const std::function<Value(std::size_t, std::size_t)>& cost) {
  Value total_supply{}, total_demand{};
  for (const auto& s : supply) {
    if (!(s > Value{})) throw Error(ErrorKind::Validation, "supplies must be positive");
    total_supply += s;
  }
  for (const auto& d : demand) {
    if (!(d > Value{})) throw Error(ErrorKind::Validation, "demands must be positive");
    total_demand += d;
  }
  if (total_supply != total_demand)
    throw Error(ErrorKind::Validation, "transport problem is unbalanced");

  TransportSolution<Value> out;
  if (supply.empty()) return out;

  const std::size_t p = supply.size();
  const std::size_t q = demand.size();
  const std::size_t source = p + q;
  const std::size_t sink = p + q + 1;
  MinCostFlow<Value> net(p + q + 2);
  for (std::size_t i = 0; i < p; ++i) net.add_edge(source, i, supply[i], Value{});
  for (std::size_t j = 0; j < q; ++j) net.add_edge(p + j, sink, demand[j], Value{});
  std::vector<std::size_t> arc_ids(p * q);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j)
      arc_ids[i * q + j] = net.add_unbounded_edge(i, p + j, cost(i, j));

  out.cost = net.solve(source, sink, total_supply);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      const auto& e = net.edge(arc_ids[i * q + j]);
      if (e.flow > Value{}) out.arcs.push_back({i, j, e.flow});
    }

  // pi(j) <= pi(i) + c(i,j) always, with equality where flow > 0; negate to
  // get prices oriented as supply minus demand.
  const auto pi = net.potentials();
  for (std::size_t i = 0; i < p; ++i) out.supply_price.push_back(-pi[i]);
  for (std::size_t j = 0; j < q; ++j) out.demand_price.push_back(-pi[p + j]);
  return out;
}

}  // namespace embedlab
