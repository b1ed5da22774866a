#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dflow/engine.hpp"

namespace dflow::apps {

enum class Op : std::uint8_t { Sum, Prod };

using TreeNode = std::uint32_t;
inline constexpr TreeNode kNoTreeNode = kNullIndex;

enum class Side : std::uint8_t { Left, Right };

/// Plain description of an expression, used to build a reactive tree.
struct Expr {
  static Expr leaf(std::int64_t value);
  static Expr apply(Op op, Expr left, Expr right);

  bool is_leaf = true;
  std::int64_t value = 0;
  Op op = Op::Sum;
  std::vector<Expr> children;
};

/// Applies `op` with two's-complement wrap-around, the arithmetic used by
/// every node constraint.
constexpr std::int64_t apply_op(Op op, std::int64_t a, std::int64_t b) noexcept {
  const auto ua = static_cast<std::uint64_t>(a);
  const auto ub = static_cast<std::uint64_t>(b);
  return static_cast<std::int64_t>(op == Op::Sum ? ua + ub : ua * ub);
}

/// Binary expression tree whose internal nodes keep `val = left (op) right`
/// through one constraint per node.
class ExpTree {
 public:
  explicit ExpTree(Engine& engine);
  ~ExpTree();

  ExpTree(const ExpTree&) = delete;
  ExpTree& operator=(const ExpTree&) = delete;

  TreeNode make_leaf(std::int64_t value);
  TreeNode make_op(Op op);

  /// Builds `expr` bottom-up inside one atomic block and returns its root.
  TreeNode build(const Expr& expr);

  /// Attaches `child` (which must be detached) under `parent`. Throws
  /// CycleDetected if `parent` lies inside the subtree of `child`.
  void set_child(TreeNode parent, Side side, TreeNode child);

  /// Replaces the subtree under (parent, side) with `subtree` and deletes
  /// the old subtree's nodes and constraints depth-first.
  void splice(TreeNode parent, Side side, TreeNode subtree);

  /// Detaches and deletes the subtree under (parent, side).
  void remove_child(TreeNode parent, Side side);

  /// Deletes a detached subtree.
  void erase_subtree(TreeNode root);

  void set_leaf(TreeNode node, std::int64_t value);
  void set_op(TreeNode node, Op op);

  std::int64_t value(TreeNode node) const;
  Op op(TreeNode node) const;
  TreeNode child(TreeNode node, Side side) const;
  TreeNode parent(TreeNode node) const;
  bool is_leaf(TreeNode node) const;
  ConstraintId constraint(TreeNode node) const;
  Cell<std::int64_t> value_cell(TreeNode node) const;

  std::size_t size() const noexcept { return live_; }
  std::size_t height(TreeNode root) const;

 private:
  struct Node {
    Cell<std::int64_t> val;
    Cell<Op> op;
    Cell<TreeNode> left;
    Cell<TreeNode> right;
    ConstraintId cons;
    TreeNode parent = kNoTreeNode;
    bool alive = false;
  };

  TreeNode allocate(std::int64_t value, Op op);
  void evaluate(TreeNode index);
  const Node& checked(TreeNode node) const;
  Cell<TreeNode> side_cell(const Node& node, Side side) const;

  Engine& engine_;
  std::vector<Node> nodes_;
  std::vector<TreeNode> free_;
  std::size_t live_ = 0;
};

}  // namespace dflow::apps
