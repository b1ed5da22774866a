#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dflow/engine.hpp"

namespace dflow::apps {

using ListNode = std::uint32_t;
inline constexpr ListNode kNoListNode = kNullIndex;

/// Doubly linked list whose `val`, `next` and `prev` fields and head pointer
/// are reactive cells. Node references are arena indices; kNoListNode is null.
///
/// Removal only unlinks a node; its cells stay readable until release().
class ReactiveList {
 public:
  explicit ReactiveList(Engine& engine);
  ~ReactiveList();

  ReactiveList(const ReactiveList&) = delete;
  ReactiveList& operator=(const ReactiveList&) = delete;

  Engine& engine() const noexcept { return engine_; }
  Cell<ListNode> head() const noexcept { return head_; }

  Cell<std::int64_t> val_cell(ListNode node) const;
  Cell<ListNode> next_cell(ListNode node) const;
  Cell<ListNode> prev_cell(ListNode node) const;

  std::int64_t value(ListNode node) const { return engine_.peek(val_cell(node)); }
  ListNode next(ListNode node) const { return engine_.peek(next_cell(node)); }
  ListNode prev(ListNode node) const { return engine_.peek(prev_cell(node)); }
  ListNode first() const { return engine_.peek(head_); }

  /// Inserts a node after `pred` (kNoListNode inserts at the front).
  ListNode insert_after(ListNode pred, std::int64_t value);

  /// Unlinks the successor of `pred` (kNoListNode unlinks the first node)
  /// and returns it, or kNoListNode if there is none.
  ListNode remove_after(ListNode pred);

  /// Frees the cells of an unlinked node.
  void release(ListNode node);

  void set_value(ListNode node, std::int64_t value) { engine_.set(val_cell(node), value); }

  /// Appends `values` in order inside one atomic block. Returns the nodes.
  std::vector<ListNode> append(const std::vector<std::int64_t>& values);

  /// Node sequence from the head, via untracked reads. Stops after
  /// `limit` nodes so a corrupted cyclic chain cannot hang the caller.
  std::vector<ListNode> nodes(std::size_t limit = SIZE_MAX) const;
  std::vector<std::int64_t> values(std::size_t limit = SIZE_MAX) const;

  std::size_t allocated() const noexcept { return live_; }

 private:
  struct Node {
    Cell<std::int64_t> val;
    Cell<ListNode> next;
    Cell<ListNode> prev;
    bool alive = false;
  };

  const Node& checked(ListNode node) const;

  Engine& engine_;
  Cell<ListNode> head_;
  ListNode tail_hint_ = kNoListNode;
  std::vector<Node> nodes_;
  std::vector<ListNode> free_;
  std::size_t live_ = 0;
};

}  // namespace dflow::apps
