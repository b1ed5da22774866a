#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "dflow/engine.hpp"

namespace dflow::apps {

using Vertex = std::uint32_t;
using Weight = std::int64_t;
using Distance = std::int64_t;

inline constexpr Distance kUnreachable = std::numeric_limits<Distance>::max() / 4;

struct Edge {
  Vertex from;
  Vertex to;
  Weight weight;
};

/// Single-source distances maintained incrementally under edge insertions
/// and weight decreases. Distances only ever decrease, so every relaxation
/// order reaches the same fixpoint.
///
/// PerNode (default): one constraint per vertex. It depends on its own
/// distance cell and relaxes all outgoing edges; an update relaxes the
/// touched edge directly and lets the cascade do the rest, so only vertices
/// whose distance changes re-execute.
///
/// PerEdge: one constraint per edge reading d[u], w(u,v) and d[v], exactly
/// the relaxation rule `if d[u] + w < d[v] then d[v] := d[u] + w`.
class ShortestPaths {
 public:
  enum class Variant { PerNode, PerEdge };

  ShortestPaths(Engine& engine, std::size_t vertex_count, Vertex source, Variant variant = Variant::PerNode);
  ~ShortestPaths();

  ShortestPaths(const ShortestPaths&) = delete;
  ShortestPaths& operator=(const ShortestPaths&) = delete;

  /// Adds edge (u, v). Parallel edges are rejected with DuplicateEdge.
  void insert(Vertex u, Vertex v, Weight w);

  /// Inserts many edges inside one atomic block.
  void insert_all(const std::vector<Edge>& edges);

  /// w(u, v) -= delta, delta > 0.
  void decrease(Vertex u, Vertex v, Weight delta);

  Distance distance(Vertex v) const;
  std::vector<Distance> distances() const;
  Weight weight(Vertex u, Vertex v) const;
  bool has_edge(Vertex u, Vertex v) const;

  std::size_t vertex_count() const noexcept { return dist_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  Vertex source() const noexcept { return source_; }
  Variant variant() const noexcept { return variant_; }
  std::vector<Edge> edges() const;

  Cell<Distance> distance_cell(Vertex v) const;
  ConstraintId vertex_constraint(Vertex v) const;

  /// Vertex carried as the user parameter of a constraint of this instance.
  Vertex vertex_of(ConstraintId id) const;

  /// Pops the queued constraint whose vertex is closest to the source.
  Comparator min_distance_comparator() const;

 private:
  struct EdgeRecord {
    Vertex from;
    Vertex to;
    Cell<Weight> weight;
    ConstraintId cons;
  };

  void check_vertex(Vertex v) const;
  std::size_t edge_index(Vertex u, Vertex v) const;
  void relax_out(Vertex u);
  void relax_edge(std::size_t e);
  void relax_now(Vertex u, Vertex v, Weight w);

  Engine& engine_;
  Vertex source_;
  Variant variant_;
  std::vector<Cell<Distance>> dist_;
  std::vector<ConstraintId> vertex_cons_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<EdgeRecord> edges_;
  std::unordered_map<std::uint64_t, std::size_t> edge_lookup_;
};

}  // namespace dflow::apps
