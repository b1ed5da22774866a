#include "dflow/bench/oracles.hpp"

#include <functional>
#include <queue>
#include <utility>

namespace dflow::bench {

using apps::Distance;
using apps::Edge;
using apps::kUnreachable;
using apps::Vertex;

std::int64_t wrap_add(std::int64_t a, std::int64_t b) noexcept {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}

std::int64_t wrap_mul(std::int64_t a, std::int64_t b) noexcept {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

namespace {

std::vector<std::vector<std::pair<Vertex, apps::Weight>>> adjacency(std::size_t n, std::span<const Edge> edges) {
  std::vector<std::vector<std::pair<Vertex, apps::Weight>>> adj(n);
  for (const Edge& e : edges) adj[e.from].emplace_back(e.to, e.weight);
  return adj;
}

}  // namespace

std::vector<Distance> dijkstra(std::size_t vertex_count, std::span<const Edge> edges, Vertex source) {
  const auto adj = adjacency(vertex_count, edges);
  std::vector<Distance> dist(vertex_count, kUnreachable);
  using Item = std::pair<Distance, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0;
  heap.emplace(0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d != dist[u]) continue;
    for (const auto& [v, w] : adj[u]) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        heap.emplace(dist[v], v);
      }
    }
  }
  return dist;
}

std::vector<Distance> bellman_ford(std::size_t vertex_count, std::span<const Edge> edges, Vertex source) {
  std::vector<Distance> dist(vertex_count, kUnreachable);
  dist[source] = 0;
  for (std::size_t round = 0; round + 1 < vertex_count || round == 0; ++round) {
    bool changed = false;
    for (const Edge& e : edges) {
      if (dist[e.from] < kUnreachable && dist[e.from] + e.weight < dist[e.to]) {
        dist[e.to] = dist[e.from] + e.weight;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

std::ptrdiff_t violated_inequality(std::span<const Distance> dist, std::span<const Edge> edges) {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (dist[e.from] < kUnreachable && dist[e.from] + e.weight < dist[e.to]) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

bool distances_realized(std::span<const Distance> dist, std::span<const Edge> edges, Vertex source) {
  const std::size_t n = dist.size();
  if (dist[source] != 0) return false;
  // Every finite distance must be reachable from the source along tight edges.
  std::vector<std::vector<Vertex>> tight(n);
  for (const Edge& e : edges) {
    if (dist[e.from] < kUnreachable && dist[e.from] + e.weight == dist[e.to]) tight[e.from].push_back(e.to);
  }
  std::vector<bool> seen(n, false);
  std::vector<Vertex> stack{source};
  seen[source] = true;
  while (!stack.empty()) {
    const Vertex u = stack.back();
    stack.pop_back();
    for (Vertex v : tight[u]) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  for (Vertex v = 0; v < n; ++v) {
    if (dist[v] < kUnreachable && !seen[v]) return false;
  }
  return true;
}

std::int64_t evaluate(const apps::Expr& expr) {
  if (expr.is_leaf) return expr.value;
  return apps::apply_op(expr.op, evaluate(expr.children[0]), evaluate(expr.children[1]));
}

std::vector<std::int64_t> vecmat_product(std::span<const std::int64_t> vector,
                                         const std::vector<std::vector<std::int64_t>>& matrix) {
  const std::size_t cols = matrix.empty() ? 0 : matrix[0].size();
  std::vector<std::int64_t> out(cols, 0);
  for (std::size_t i = 0; i < vector.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[j] = wrap_add(out[j], wrap_mul(vector[i], matrix[i][j]));
  }
  return out;
}

std::int64_t list_sum(std::span<const std::int64_t> values) {
  std::int64_t sum = 0;
  for (std::int64_t v : values) sum = wrap_add(sum, v);
  return sum;
}

}  // namespace dflow::bench
