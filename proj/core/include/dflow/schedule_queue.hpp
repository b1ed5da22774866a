#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dflow/comparator.hpp"
#include "dflow/handles.hpp"

namespace dflow {

/// Deduplicating priority queue over constraint slots.
///
/// Implemented as an indexed binary heap: push, pop, erase and
/// reprioritize are O(log n), membership is O(1).
class ScheduleQueue {
 public:
  using Slot = std::uint32_t;

  explicit ScheduleQueue(Comparator cmp = Comparator::least_recently_executed());

  /// Returns false (and leaves the queue unchanged) if `slot` is already queued.
  bool push(Slot slot, Stamp last_exec, UserParam param);

  /// Restores heap order for `slot` after its user-parameter priority changed.
  void reprioritize(Slot slot);

  std::optional<Slot> pop();
  bool erase(Slot slot);
  bool contains(Slot slot) const noexcept;

  std::size_t size() const noexcept { return heap_.size(); }
  bool empty() const noexcept { return heap_.empty(); }
  void clear() noexcept;

  /// Throws Error{QueueNotEmpty} unless the queue is empty.
  void set_comparator(Comparator cmp);
  const Comparator& comparator() const noexcept { return cmp_; }

 private:
  struct Key {
    Stamp last_exec = 0;
    std::uint64_t seq = 0;
    UserParam param = 0;
  };

  static constexpr std::uint32_t kAbsent = UINT32_MAX;

  bool before(Slot a, Slot b) const;
  void sift_up(std::size_t i);
  void sift_down(std::size_t i);
  void place(std::size_t i, Slot slot);
  void remove_at(std::size_t i);

  Comparator cmp_;
  std::vector<Slot> heap_;
  std::vector<std::uint32_t> pos_;
  std::vector<Key> keys_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace dflow
