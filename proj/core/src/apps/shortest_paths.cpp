#include "dflow/apps/shortest_paths.hpp"

#include <string>

namespace dflow::apps {

namespace {

std::uint64_t edge_key(Vertex u, Vertex v) { return (std::uint64_t{u} << 32) | v; }

}  // namespace

ShortestPaths::ShortestPaths(Engine& engine, std::size_t vertex_count, Vertex source, Variant variant)
    : engine_(engine), source_(source), variant_(variant) {
  if (source >= vertex_count) {
    throw Error(Errc::UnknownNode, "source " + std::to_string(source) + " is not a vertex");
  }
  dist_.reserve(vertex_count);
  for (std::size_t v = 0; v < vertex_count; ++v) {
    dist_.push_back(engine_.alloc<Distance>(v == source ? 0 : kUnreachable));
  }
  out_.resize(vertex_count);
  if (variant_ == Variant::PerNode) {
    Engine::AtomicBlock batch(engine_);
    vertex_cons_.reserve(vertex_count);
    for (std::size_t v = 0; v < vertex_count; ++v) {
      const auto u = static_cast<Vertex>(v);
      vertex_cons_.push_back(engine_.new_constraint([this, u] { relax_out(u); }, u));
    }
  }
}

ShortestPaths::~ShortestPaths() {
  for (ConstraintId id : vertex_cons_) {
    if (engine_.alive(id)) engine_.del_constraint(id);
  }
  for (const EdgeRecord& e : edges_) {
    if (engine_.alive(e.cons)) engine_.del_constraint(e.cons);
    engine_.free(e.weight);
  }
  for (Cell<Distance> d : dist_) engine_.free(d);
}

void ShortestPaths::check_vertex(Vertex v) const {
  if (v >= dist_.size()) throw Error(Errc::UnknownNode, "vertex " + std::to_string(v) + " does not exist");
}

std::size_t ShortestPaths::edge_index(Vertex u, Vertex v) const {
  check_vertex(u);
  check_vertex(v);
  const auto it = edge_lookup_.find(edge_key(u, v));
  if (it == edge_lookup_.end()) {
    throw Error(Errc::UnknownNode, "edge (" + std::to_string(u) + ", " + std::to_string(v) + ") does not exist");
  }
  return it->second;
}

void ShortestPaths::relax_out(Vertex u) {
  const Distance du = engine_.get(dist_[u]);
  if (du >= kUnreachable) return;
  for (std::size_t e : out_[u]) {
    const EdgeRecord& edge = edges_[e];
    const Distance candidate = du + engine_.peek(edge.weight);
    if (candidate < engine_.peek(dist_[edge.to])) engine_.set(dist_[edge.to], candidate);
  }
}

void ShortestPaths::relax_edge(std::size_t e) {
  const EdgeRecord& edge = edges_[e];
  const Distance du = engine_.get(dist_[edge.from]);
  const Weight w = engine_.get(edge.weight);
  const Distance dv = engine_.get(dist_[edge.to]);
  if (du < kUnreachable && du + w < dv) engine_.set(dist_[edge.to], du + w);
}

void ShortestPaths::relax_now(Vertex u, Vertex v, Weight w) {
  const Distance du = engine_.peek(dist_[u]);
  if (du < kUnreachable && du + w < engine_.peek(dist_[v])) engine_.set(dist_[v], du + w);
}

void ShortestPaths::insert(Vertex u, Vertex v, Weight w) {
  check_vertex(u);
  check_vertex(v);
  if (edge_lookup_.contains(edge_key(u, v))) {
    throw Error(Errc::DuplicateEdge, "edge (" + std::to_string(u) + ", " + std::to_string(v) + ") already exists");
  }
  const std::size_t e = edges_.size();
  edges_.push_back(EdgeRecord{u, v, engine_.alloc<Weight>(w), ConstraintId{}});
  edge_lookup_.emplace(edge_key(u, v), e);
  out_[u].push_back(e);
  if (variant_ == Variant::PerNode) {
    relax_now(u, v, w);
  } else {
    const ConstraintId id = engine_.new_constraint([this, e] { relax_edge(e); }, u);
    edges_[e].cons = id;
  }
}

void ShortestPaths::insert_all(const std::vector<Edge>& edges) {
  Engine::AtomicBlock batch(engine_);
  for (const Edge& e : edges) insert(e.from, e.to, e.weight);
}

void ShortestPaths::decrease(Vertex u, Vertex v, Weight delta) {
  if (delta <= 0) throw Error(Errc::InvalidArgument, "weight decrease must be positive");
  const std::size_t e = edge_index(u, v);
  const Weight w = engine_.peek(edges_[e].weight) - delta;
  if (variant_ == Variant::PerNode) {
    Engine::AtomicBlock batch(engine_);
    engine_.set(edges_[e].weight, w);
    relax_now(u, v, w);
  } else {
    engine_.set(edges_[e].weight, w);
  }
}

Distance ShortestPaths::distance(Vertex v) const {
  check_vertex(v);
  return engine_.peek(dist_[v]);
}

std::vector<Distance> ShortestPaths::distances() const {
  std::vector<Distance> out;
  out.reserve(dist_.size());
  for (Cell<Distance> d : dist_) out.push_back(engine_.peek(d));
  return out;
}

Weight ShortestPaths::weight(Vertex u, Vertex v) const { return engine_.peek(edges_[edge_index(u, v)].weight); }

bool ShortestPaths::has_edge(Vertex u, Vertex v) const { return edge_lookup_.contains(edge_key(u, v)); }

std::vector<Edge> ShortestPaths::edges() const {
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (const EdgeRecord& e : edges_) out.push_back(Edge{e.from, e.to, engine_.peek(e.weight)});
  return out;
}

Cell<Distance> ShortestPaths::distance_cell(Vertex v) const {
  check_vertex(v);
  return dist_[v];
}

ConstraintId ShortestPaths::vertex_constraint(Vertex v) const {
  check_vertex(v);
  if (variant_ != Variant::PerNode) throw Error(Errc::InvalidArgument, "per-edge instances have no vertex constraints");
  return vertex_cons_[v];
}

Vertex ShortestPaths::vertex_of(ConstraintId id) const { return static_cast<Vertex>(engine_.param(id)); }

Comparator ShortestPaths::min_distance_comparator() const {
  return Comparator::by_param([this](UserParam a, UserParam b) {
    return engine_.peek(dist_[static_cast<Vertex>(a)]) < engine_.peek(dist_[static_cast<Vertex>(b)]);
  });
}

}  // namespace dflow::apps
