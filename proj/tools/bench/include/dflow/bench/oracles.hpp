#pragma once

// From-scratch reference computations. None of these touch the engine.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dflow/apps/exptree.hpp"
#include "dflow/apps/shortest_paths.hpp"

namespace dflow::bench {

std::int64_t wrap_add(std::int64_t a, std::int64_t b) noexcept;
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) noexcept;

/// Plain binary-heap Dijkstra over non-negative weights. Unreached vertices
/// get apps::kUnreachable.
std::vector<apps::Distance> dijkstra(std::size_t vertex_count, std::span<const apps::Edge> edges,
                                     apps::Vertex source);

/// Bellman-Ford over arbitrary weights (no negative cycles assumed).
std::vector<apps::Distance> bellman_ford(std::size_t vertex_count, std::span<const apps::Edge> edges,
                                         apps::Vertex source);

/// First edge (u, v) with d[u] + w < d[v], or -1 when all inequalities hold.
std::ptrdiff_t violated_inequality(std::span<const apps::Distance> dist, std::span<const apps::Edge> edges);

/// True iff every finite d[v] is realized by a path from the source made of
/// edges with d[u] + w(u, v) == d[v].
bool distances_realized(std::span<const apps::Distance> dist, std::span<const apps::Edge> edges,
                        apps::Vertex source);

std::int64_t evaluate(const apps::Expr& expr);

std::vector<std::int64_t> vecmat_product(std::span<const std::int64_t> vector,
                                         const std::vector<std::vector<std::int64_t>>& matrix);

std::int64_t list_sum(std::span<const std::int64_t> values);

/// Index of the first differing element, or -1 when equal (a length
/// mismatch reports the shorter length).
template <class T>
std::ptrdiff_t first_mismatch(std::span<const T> expected, std::span<const T> actual) {
  const std::size_t common = expected.size() < actual.size() ? expected.size() : actual.size();
  for (std::size_t i = 0; i < common; ++i) {
    if (expected[i] != actual[i]) return static_cast<std::ptrdiff_t>(i);
  }
  if (expected.size() != actual.size()) return static_cast<std::ptrdiff_t>(common);
  return -1;
}

}  // namespace dflow::bench
