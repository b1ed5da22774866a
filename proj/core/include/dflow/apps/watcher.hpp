#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "dflow/apps/reactive_list.hpp"
#include "dflow/engine.hpp"

namespace dflow::apps {

/// Monitors a linked structure through a shadow chain of constraints, one
/// per reachable node plus a generator bound to the head cell.
///
/// Each shadow constraint reads the `next` cell it mirrors, links to (or
/// creates) the successor's shadow, and calls `watch` on its node. Shadows
/// that fall off the chain are reference counted and reclaimed by a final
/// handler once the session settles. The watched nodes never know about the
/// watcher; several watchers may monitor the same list.
class Watcher {
 public:
  using NextOf = std::function<Cell<ListNode>(ListNode)>;
  using WatchFn = std::function<void(ListNode)>;
  using ReleaseFn = std::function<void(ListNode)>;

  /// `release` runs (in a final handler) when a node's shadow is reclaimed.
  Watcher(Engine& engine, Cell<ListNode> head, NextOf next_of, WatchFn watch, ReleaseFn release = {});

  /// Convenience overload for ReactiveList.
  Watcher(ReactiveList& list, WatchFn watch, ReleaseFn release = {});

  ~Watcher();

  Watcher(const Watcher&) = delete;
  Watcher& operator=(const Watcher&) = delete;

  /// Deletes every shadow constraint. Idempotent.
  void detach();
  bool attached() const noexcept { return generator_ != kNone; }

  /// Live shadow nodes, generator included.
  std::size_t shadow_count() const noexcept { return live_; }

  /// Nodes whose shadow is currently alive, in shadow-chain order.
  std::vector<ListNode> mirrored() const;

 private:
  static constexpr std::uint32_t kNone = kNullIndex;

  struct Shadow {
    ListNode head = kNoListNode;
    Cell<ListNode> tail;
    std::uint32_t next = kNone;
    std::uint32_t refc = 0;
    ConstraintId cons;
    bool alive = false;
  };

  std::uint32_t create(ListNode head, Cell<ListNode> tail);
  void run(std::uint32_t index);
  void destroy(std::uint32_t index);

  Engine& engine_;
  NextOf next_of_;
  WatchFn watch_;
  ReleaseFn release_;
  std::vector<Shadow> shadows_;
  std::vector<std::uint32_t> free_;
  std::unordered_map<CellId, std::uint32_t> by_tail_;
  std::uint32_t generator_ = kNone;
  std::size_t live_ = 0;
};

/// Watches `list` and restores `x.next.prev == x` for every reachable node
/// whenever a next or prev pointer changes.
std::unique_ptr<Watcher> attach_repairer(ReactiveList& list);

}  // namespace dflow::apps
