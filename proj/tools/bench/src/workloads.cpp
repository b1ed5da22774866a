#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "dflow/apps/exptree.hpp"
#include "dflow/apps/shortest_paths.hpp"
#include "dflow/apps/vecmat.hpp"
#include "dflow/bench/oracles.hpp"
#include "dflow/bench/workloads.hpp"

namespace dflow::bench {

namespace {

using apps::Op;
using apps::Side;
using apps::TreeNode;

std::int64_t small_value(std::mt19937_64& rng) { return std::uniform_int_distribution<std::int64_t>(-1000, 1000)(rng); }

// ---------------------------------------------------------------------------

class ExpTrees final : public Workload {
 public:
  ExpTrees(Engine& engine, const WorkloadOptions& options) : engine_(engine), rng_(options.seed) {}

  std::string_view name() const override { return "exptrees"; }

  void build(std::size_t n) override {
    const std::size_t leaves = std::max<std::size_t>(1, (n + 1) / 2);
    const apps::Expr expr = balanced(0, leaves);
    tree_ = std::make_unique<apps::ExpTree>(engine_);
    root_ = tree_->build(expr);
    mirror(expr, root_);
  }

  void update() override {
    const bool op_change = !internal_.empty() && std::uniform_int_distribution<int>(0, 1)(rng_) == 1;
    if (op_change) {
      const TreeNode t = internal_[std::uniform_int_distribution<std::size_t>(0, internal_.size() - 1)(rng_)];
      Host& h = host_[t];
      h.op = h.op == Op::Sum ? Op::Prod : Op::Sum;
      tree_->set_op(t, h.op);
    } else {
      const TreeNode t = leaves_[std::uniform_int_distribution<std::size_t>(0, leaves_.size() - 1)(rng_)];
      host_[t].value = small_value(rng_);
      tree_->set_leaf(t, host_[t].value);
    }
  }

  std::vector<std::vector<std::int64_t>> outputs() const override { return {{tree_->value(root_)}}; }

  std::optional<std::string> verify() const override {
    // Post-order over the host mirror.
    std::unordered_map<TreeNode, std::int64_t> value;
    std::vector<std::pair<TreeNode, bool>> stack{{root_, false}};
    while (!stack.empty()) {
      const auto [t, expanded] = stack.back();
      stack.pop_back();
      const Host& h = host_.at(t);
      if (h.leaf) {
        value[t] = h.value;
      } else if (!expanded) {
        stack.emplace_back(t, true);
        stack.emplace_back(h.left, false);
        stack.emplace_back(h.right, false);
      } else {
        value[t] = apps::apply_op(h.op, value.at(h.left), value.at(h.right));
      }
    }
    for (const auto& [t, expected] : value) {
      const std::int64_t actual = tree_->value(t);
      if (actual != expected) {
        return "node " + std::to_string(t) + ": expected " + std::to_string(expected) + ", got " +
               std::to_string(actual);
      }
    }
    return std::nullopt;
  }

 private:
  struct Host {
    bool leaf = true;
    std::int64_t value = 0;
    Op op = Op::Sum;
    TreeNode left = apps::kNoTreeNode;
    TreeNode right = apps::kNoTreeNode;
  };

  apps::Expr balanced(std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return apps::Expr::leaf(small_value(rng_));
    const std::size_t mid = lo + (hi - lo) / 2;
    const Op op = std::uniform_int_distribution<int>(0, 1)(rng_) == 0 ? Op::Sum : Op::Prod;
    return apps::Expr::apply(op, balanced(lo, mid), balanced(mid, hi));
  }

  void mirror(const apps::Expr& root_expr, TreeNode root) {
    std::vector<std::pair<const apps::Expr*, TreeNode>> stack{{&root_expr, root}};
    while (!stack.empty()) {
      const auto [e, t] = stack.back();
      stack.pop_back();
      Host h;
      h.leaf = e->is_leaf;
      h.value = e->value;
      h.op = e->op;
      if (!e->is_leaf) {
        h.left = tree_->child(t, Side::Left);
        h.right = tree_->child(t, Side::Right);
        stack.emplace_back(&e->children[0], h.left);
        stack.emplace_back(&e->children[1], h.right);
        internal_.push_back(t);
      } else {
        leaves_.push_back(t);
      }
      host_[t] = h;
    }
  }

  Engine& engine_;
  std::mt19937_64 rng_;
  std::unique_ptr<apps::ExpTree> tree_;
  TreeNode root_ = apps::kNoTreeNode;
  std::unordered_map<TreeNode, Host> host_;
  std::vector<TreeNode> leaves_;
  std::vector<TreeNode> internal_;
};

// ---------------------------------------------------------------------------

class VecMat final : public Workload {
 public:
  VecMat(Engine& engine, const WorkloadOptions& options)
      : engine_(engine), rng_(options.seed), block_(options.vecmat_block) {}

  std::string_view name() const override { return "vecmat"; }

  void build(std::size_t n) override {
    const auto d = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
    vector_.resize(d);
    for (auto& v : vector_) v = small_value(rng_);
    matrix_.assign(d, std::vector<std::int64_t>(d));
    for (auto& row : matrix_) {
      for (auto& v : row) v = small_value(rng_);
    }
    product_ = std::make_unique<apps::VecMatProduct>(engine_, vector_, matrix_, std::clamp<std::size_t>(block_, 1, d));
  }

  void update() override {
    const std::size_t d = vector_.size();
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, d - 1)(rng_);
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, d - 1)(rng_);
    matrix_[i][j] = small_value(rng_);
    product_->set_cell(i, j, matrix_[i][j]);
  }

  std::vector<std::vector<std::int64_t>> outputs() const override { return {product_->outputs()}; }

  std::optional<std::string> verify() const override {
    const auto expected = vecmat_product(vector_, matrix_);
    const auto actual = product_->outputs();
    const auto i = first_mismatch<std::int64_t>(expected, actual);
    if (i < 0) return std::nullopt;
    return "output " + std::to_string(i) + ": expected " + std::to_string(expected[i]) + ", got " +
           std::to_string(actual[i]);
  }

 private:
  Engine& engine_;
  std::mt19937_64 rng_;
  std::size_t block_;
  std::vector<std::int64_t> vector_;
  std::vector<std::vector<std::int64_t>> matrix_;
  std::unique_ptr<apps::VecMatProduct> product_;
};

// ---------------------------------------------------------------------------

class ShortestPathsWorkload final : public Workload {
 public:
  ShortestPathsWorkload(Engine& engine, const WorkloadOptions& options, std::optional<DimacsGraph> graph)
      : engine_(engine), rng_(options.seed), graph_(std::move(graph)) {}

  std::string_view name() const override { return "sp"; }

  void build(std::size_t n) override {
    std::size_t vertices = n;
    if (graph_) {
      vertices = graph_->vertex_count;
      edges_ = std::move(graph_->edges);
      graph_.reset();
    } else {
      edges_ = random_graph(n);
    }
    for (const auto& e : edges_) negative_ = negative_ || e.weight < 0;
    sp_ = std::make_unique<apps::ShortestPaths>(engine_, vertices, 0);
    sp_->insert_all(edges_);
  }

  void update() override {
    if (edges_.empty()) return;
    for (int attempt = 0; attempt < 64; ++attempt) {
      apps::Edge& e = edges_[std::uniform_int_distribution<std::size_t>(0, edges_.size() - 1)(rng_)];
      if (e.weight < 2) continue;
      const apps::Weight delta = e.weight / 2;
      e.weight -= delta;
      sp_->decrease(e.from, e.to, delta);
      return;
    }
  }

  std::vector<std::vector<std::int64_t>> outputs() const override { return {sp_->distances()}; }

  std::optional<std::string> verify() const override {
    const auto expected = negative_ ? bellman_ford(sp_->vertex_count(), edges_, 0) : dijkstra(sp_->vertex_count(), edges_, 0);
    const auto actual = sp_->distances();
    if (const auto i = first_mismatch<apps::Distance>(expected, actual); i >= 0) {
      return "distance of vertex " + std::to_string(i) + ": expected " + std::to_string(expected[i]) + ", got " +
             std::to_string(actual[i]);
    }
    if (const auto e = violated_inequality(actual, edges_); e >= 0) {
      return "edge " + std::to_string(e) + " violates d[u] + w >= d[v]";
    }
    if (!distances_realized(actual, edges_, 0)) return "a distance is not realized by any path";
    return std::nullopt;
  }

  std::optional<Comparator> min_distance_comparator() const override {
    // The instance may still be under construction when the comparator is
    // first consulted; until then every constraint ranks equal.
    return Comparator::by_param([this](UserParam a, UserParam b) {
      if (!sp_) return false;
      return sp_->distance(static_cast<apps::Vertex>(a)) < sp_->distance(static_cast<apps::Vertex>(b));
    });
  }

 private:
  static std::uint64_t key(apps::Vertex u, apps::Vertex v) { return (std::uint64_t{u} << 32) | v; }

  std::vector<apps::Edge> random_graph(std::size_t n) {
    std::vector<apps::Edge> edges;
    if (n < 2) return edges;
    const std::size_t m = std::min<std::size_t>(10 * n, n * (n - 1));
    std::unordered_set<std::uint64_t> seen;
    std::uniform_int_distribution<apps::Vertex> vertex(0, static_cast<apps::Vertex>(n - 1));
    std::uniform_int_distribution<apps::Weight> weight(1, 1000);
    while (edges.size() < m) {
      const apps::Vertex u = vertex(rng_);
      const apps::Vertex v = vertex(rng_);
      if (u == v || !seen.insert(key(u, v)).second) continue;
      edges.push_back({u, v, weight(rng_)});
    }
    return edges;
  }

  Engine& engine_;
  std::mt19937_64 rng_;
  std::optional<DimacsGraph> graph_;
  std::vector<apps::Edge> edges_;
  bool negative_ = false;
  std::unique_ptr<apps::ShortestPaths> sp_;
};

}  // namespace

std::unique_ptr<Workload> make_exptrees_workload(Engine& engine, const WorkloadOptions& options) {
  return std::make_unique<ExpTrees>(engine, options);
}

std::unique_ptr<Workload> make_vecmat_workload(Engine& engine, const WorkloadOptions& options) {
  return std::make_unique<VecMat>(engine, options);
}

std::unique_ptr<Workload> make_random_sp_workload(Engine& engine, const WorkloadOptions& options) {
  return std::make_unique<ShortestPathsWorkload>(engine, options, std::nullopt);
}

std::unique_ptr<Workload> make_sp_workload(Engine& engine, DimacsGraph graph, const WorkloadOptions& options) {
  return std::make_unique<ShortestPathsWorkload>(engine, options, std::move(graph));
}

}  // namespace dflow::bench
