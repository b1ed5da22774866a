#include "dflow/apps/reactive_list.hpp"

#include <string>

namespace dflow::apps {

ReactiveList::ReactiveList(Engine& engine) : engine_(engine), head_(engine.alloc<ListNode>(kNoListNode)) {}

ReactiveList::~ReactiveList() {
  for (Node& n : nodes_) {
    if (!n.alive) continue;
    engine_.free(n.val);
    engine_.free(n.next);
    engine_.free(n.prev);
  }
  engine_.free(head_);
}

const ReactiveList::Node& ReactiveList::checked(ListNode node) const {
  if (node >= nodes_.size() || !nodes_[node].alive) {
    throw Error(Errc::UnknownNode, "list node " + std::to_string(node) + " does not exist");
  }
  return nodes_[node];
}

Cell<std::int64_t> ReactiveList::val_cell(ListNode node) const { return checked(node).val; }
Cell<ListNode> ReactiveList::next_cell(ListNode node) const { return checked(node).next; }
Cell<ListNode> ReactiveList::prev_cell(ListNode node) const { return checked(node).prev; }

ListNode ReactiveList::insert_after(ListNode pred, std::int64_t value) {
  const ListNode succ = pred == kNoListNode ? first() : next(pred);
  ListNode index;
  if (!free_.empty()) {
    index = free_.back();
    free_.pop_back();
  } else {
    index = static_cast<ListNode>(nodes_.size());
    nodes_.emplace_back();
  }
  Node& n = nodes_[index];
  n.val = engine_.alloc<std::int64_t>(value);
  n.next = engine_.alloc<ListNode>(succ);
  n.prev = engine_.alloc<ListNode>(pred);
  n.alive = true;
  ++live_;

  Engine::AtomicBlock batch(engine_);
  if (succ != kNoListNode) engine_.set(nodes_[succ].prev, index);
  if (pred == kNoListNode) engine_.set(head_, index);
  else engine_.set(nodes_[pred].next, index);
  return index;
}

ListNode ReactiveList::remove_after(ListNode pred) {
  const ListNode victim = pred == kNoListNode ? first() : next(pred);
  if (victim == kNoListNode) return kNoListNode;
  const ListNode succ = next(victim);
  Engine::AtomicBlock batch(engine_);
  if (succ != kNoListNode) engine_.set(nodes_[succ].prev, pred);
  if (pred == kNoListNode) engine_.set(head_, succ);
  else engine_.set(nodes_[pred].next, succ);
  if (tail_hint_ == victim) tail_hint_ = kNoListNode;
  return victim;
}

void ReactiveList::release(ListNode node) {
  checked(node);
  Node& n = nodes_[node];
  engine_.free(n.val);
  engine_.free(n.next);
  engine_.free(n.prev);
  n.alive = false;
  free_.push_back(node);
  --live_;
  if (tail_hint_ == node) tail_hint_ = kNoListNode;
}

std::vector<ListNode> ReactiveList::append(const std::vector<std::int64_t>& values) {
  std::vector<ListNode> out;
  out.reserve(values.size());
  Engine::AtomicBlock batch(engine_);
  ListNode last = tail_hint_;
  if (last == kNoListNode || next(last) != kNoListNode) {
    last = kNoListNode;
    for (ListNode n = first(); n != kNoListNode; n = next(n)) last = n;
  }
  for (std::int64_t v : values) {
    last = insert_after(last, v);
    out.push_back(last);
  }
  tail_hint_ = last;
  return out;
}

std::vector<ListNode> ReactiveList::nodes(std::size_t limit) const {
  std::vector<ListNode> out;
  for (ListNode n = first(); n != kNoListNode && out.size() < limit; n = next(n)) out.push_back(n);
  return out;
}

std::vector<std::int64_t> ReactiveList::values(std::size_t limit) const {
  std::vector<std::int64_t> out;
  for (ListNode n = first(); n != kNoListNode && out.size() < limit; n = next(n)) out.push_back(value(n));
  return out;
}

}  // namespace dflow::apps
