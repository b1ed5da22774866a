#include "dflow/apps/exptree.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace dflow::apps {

Expr Expr::leaf(std::int64_t value) {
  Expr e;
  e.value = value;
  return e;
}

Expr Expr::apply(Op op, Expr left, Expr right) {
  Expr e;
  e.is_leaf = false;
  e.op = op;
  e.children.push_back(std::move(left));
  e.children.push_back(std::move(right));
  return e;
}

ExpTree::ExpTree(Engine& engine) : engine_(engine) {}

ExpTree::~ExpTree() {
  for (TreeNode i = 0; i < nodes_.size(); ++i) {
    Node& n = nodes_[i];
    if (!n.alive) continue;
    if (engine_.alive(n.cons)) engine_.del_constraint(n.cons);
    engine_.free(n.val);
    engine_.free(n.op);
    engine_.free(n.left);
    engine_.free(n.right);
    n.alive = false;
  }
}

const ExpTree::Node& ExpTree::checked(TreeNode node) const {
  if (node >= nodes_.size() || !nodes_[node].alive) {
    throw Error(Errc::UnknownNode, "tree node " + std::to_string(node) + " does not exist");
  }
  return nodes_[node];
}

Cell<TreeNode> ExpTree::side_cell(const Node& node, Side side) const {
  return side == Side::Left ? node.left : node.right;
}

TreeNode ExpTree::allocate(std::int64_t value, Op op) {
  TreeNode index;
  if (!free_.empty()) {
    index = free_.back();
    free_.pop_back();
  } else {
    index = static_cast<TreeNode>(nodes_.size());
    nodes_.emplace_back();
  }
  Node& n = nodes_[index];
  n.val = engine_.alloc<std::int64_t>(value);
  n.op = engine_.alloc<Op>(op);
  n.left = engine_.alloc<TreeNode>(kNoTreeNode);
  n.right = engine_.alloc<TreeNode>(kNoTreeNode);
  n.parent = kNoTreeNode;
  n.alive = true;
  ++live_;
  nodes_[index].cons = engine_.new_constraint([this, index] { evaluate(index); }, index);
  return index;
}

void ExpTree::evaluate(TreeNode index) {
  const Node& n = nodes_[index];
  const TreeNode l = engine_.get(n.left);
  if (l == kNoTreeNode) return;
  const TreeNode r = engine_.get(n.right);
  if (r == kNoTreeNode) return;
  const std::int64_t a = engine_.get(nodes_[l].val);
  const std::int64_t b = engine_.get(nodes_[r].val);
  engine_.set(n.val, apply_op(engine_.get(n.op), a, b));
}

TreeNode ExpTree::make_leaf(std::int64_t value) { return allocate(value, Op::Sum); }

TreeNode ExpTree::make_op(Op op) { return allocate(0, op); }

TreeNode ExpTree::build(const Expr& expr) {
  Engine::AtomicBlock batch(engine_);
  // Explicit stack so deep expressions do not recurse.
  struct Frame {
    const Expr* expr;
    TreeNode node;
    std::size_t next_child;
  };
  std::vector<Frame> stack;
  TreeNode root = kNoTreeNode;
  auto open = [&](const Expr* e) -> TreeNode {
    const TreeNode n = e->is_leaf ? make_leaf(e->value) : make_op(e->op);
    if (!e->is_leaf) stack.push_back(Frame{e, n, 0});
    return n;
  };
  root = open(&expr);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_child == 2) {
      stack.pop_back();
      continue;
    }
    const Side side = f.next_child == 0 ? Side::Left : Side::Right;
    const Expr* child_expr = &f.expr->children[f.next_child];
    const TreeNode parent = f.node;
    ++f.next_child;
    const TreeNode child = open(child_expr);
    set_child(parent, side, child);
  }
  return root;
}

void ExpTree::set_child(TreeNode parent, Side side, TreeNode child) {
  const Node& p = checked(parent);
  if (child != kNoTreeNode) {
    const Node& c = checked(child);
    if (c.parent != kNoTreeNode) {
      throw Error(Errc::InvalidArgument, "tree node " + std::to_string(child) + " is already attached");
    }
    for (TreeNode walk = parent; walk != kNoTreeNode; walk = nodes_[walk].parent) {
      if (walk == child) {
        throw Error(Errc::CycleDetected, "attaching node " + std::to_string(child) + " under " +
                                             std::to_string(parent) + " would create a cycle");
      }
    }
  }
  const Cell<TreeNode> slot = side_cell(p, side);
  const TreeNode old = engine_.peek(slot);
  if (old != kNoTreeNode) nodes_[old].parent = kNoTreeNode;
  if (child != kNoTreeNode) nodes_[child].parent = parent;
  engine_.set(slot, child);
}

void ExpTree::splice(TreeNode parent, Side side, TreeNode subtree) {
  const TreeNode old = child(parent, side);
  if (old == subtree) return;
  Engine::AtomicBlock batch(engine_);
  set_child(parent, side, subtree);
  if (old != kNoTreeNode) erase_subtree(old);
}

void ExpTree::remove_child(TreeNode parent, Side side) {
  const TreeNode old = child(parent, side);
  if (old == kNoTreeNode) return;
  Engine::AtomicBlock batch(engine_);
  set_child(parent, side, kNoTreeNode);
  erase_subtree(old);
}

void ExpTree::erase_subtree(TreeNode root) {
  if (checked(root).parent != kNoTreeNode) {
    throw Error(Errc::InvalidArgument, "tree node " + std::to_string(root) + " is still attached");
  }
  std::vector<TreeNode> stack{root};
  while (!stack.empty()) {
    const TreeNode index = stack.back();
    stack.pop_back();
    Node& n = nodes_[index];
    for (Cell<TreeNode> c : {n.left, n.right}) {
      const TreeNode ch = engine_.peek(c);
      if (ch != kNoTreeNode) stack.push_back(ch);
    }
    engine_.del_constraint(n.cons);
    engine_.free(n.val);
    engine_.free(n.op);
    engine_.free(n.left);
    engine_.free(n.right);
    n.alive = false;
    n.parent = kNoTreeNode;
    free_.push_back(index);
    --live_;
  }
}

void ExpTree::set_leaf(TreeNode node, std::int64_t value) { engine_.set(checked(node).val, value); }

void ExpTree::set_op(TreeNode node, Op op) { engine_.set(checked(node).op, op); }

std::int64_t ExpTree::value(TreeNode node) const { return engine_.peek(checked(node).val); }

Op ExpTree::op(TreeNode node) const { return engine_.peek(checked(node).op); }

TreeNode ExpTree::child(TreeNode node, Side side) const { return engine_.peek(side_cell(checked(node), side)); }

TreeNode ExpTree::parent(TreeNode node) const { return checked(node).parent; }

bool ExpTree::is_leaf(TreeNode node) const {
  return child(node, Side::Left) == kNoTreeNode && child(node, Side::Right) == kNoTreeNode;
}

ConstraintId ExpTree::constraint(TreeNode node) const { return checked(node).cons; }

Cell<std::int64_t> ExpTree::value_cell(TreeNode node) const { return checked(node).val; }

std::size_t ExpTree::height(TreeNode root) const {
  std::size_t best = 0;
  std::vector<std::pair<TreeNode, std::size_t>> stack{{root, 0}};
  while (!stack.empty()) {
    auto [n, depth] = stack.back();
    stack.pop_back();
    best = std::max(best, depth);
    for (Side s : {Side::Left, Side::Right}) {
      const TreeNode c = child(n, s);
      if (c != kNoTreeNode) stack.emplace_back(c, depth + 1);
    }
  }
  return best;
}

}  // namespace dflow::apps
