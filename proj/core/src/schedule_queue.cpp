#include "dflow/schedule_queue.hpp"

#include <utility>

#include "dflow/errors.hpp"

namespace dflow {

ScheduleQueue::ScheduleQueue(Comparator cmp) : cmp_(std::move(cmp)) {}

bool ScheduleQueue::contains(Slot slot) const noexcept {
  return slot < pos_.size() && pos_[slot] != kAbsent;
}

bool ScheduleQueue::push(Slot slot, Stamp last_exec, UserParam param) {
  if (contains(slot)) return false;
  if (slot >= pos_.size()) {
    pos_.resize(slot + 1, kAbsent);
    keys_.resize(slot + 1);
  }
  keys_[slot] = Key{last_exec, next_seq_++, param};
  heap_.push_back(slot);
  pos_[slot] = static_cast<std::uint32_t>(heap_.size() - 1);
  sift_up(heap_.size() - 1);
  return true;
}

void ScheduleQueue::reprioritize(Slot slot) {
  if (!contains(slot)) return;
  const std::size_t i = pos_[slot];
  sift_up(i);
  sift_down(pos_[slot]);
}

std::optional<ScheduleQueue::Slot> ScheduleQueue::pop() {
  if (heap_.empty()) return std::nullopt;
  const Slot top = heap_.front();
  remove_at(0);
  return top;
}

bool ScheduleQueue::erase(Slot slot) {
  if (!contains(slot)) return false;
  remove_at(pos_[slot]);
  return true;
}

void ScheduleQueue::clear() noexcept {
  for (Slot s : heap_) pos_[s] = kAbsent;
  heap_.clear();
}

void ScheduleQueue::set_comparator(Comparator cmp) {
  if (!heap_.empty()) throw Error(Errc::QueueNotEmpty, "comparator can only change while the queue is empty");
  cmp_ = std::move(cmp);
}

bool ScheduleQueue::before(Slot a, Slot b) const {
  const Key& ka = keys_[a];
  const Key& kb = keys_[b];
  switch (cmp_.kind()) {
    case Comparator::Kind::LeastRecentlyExecuted:
      if (ka.last_exec != kb.last_exec) return ka.last_exec < kb.last_exec;
      break;
    case Comparator::Kind::Lifo:
      if (ka.seq != kb.seq) return ka.seq > kb.seq;
      break;
    case Comparator::Kind::UserParam: {
      const auto& less = cmp_.param_less();
      if (less(ka.param, kb.param)) return true;
      if (less(kb.param, ka.param)) return false;
      break;
    }
  }
  return a < b;
}

void ScheduleQueue::place(std::size_t i, Slot slot) {
  heap_[i] = slot;
  pos_[slot] = static_cast<std::uint32_t>(i);
}

void ScheduleQueue::sift_up(std::size_t i) {
  const Slot moving = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!before(moving, heap_[parent])) break;
    place(i, heap_[parent]);
    i = parent;
  }
  place(i, moving);
}

void ScheduleQueue::sift_down(std::size_t i) {
  const Slot moving = heap_[i];
  const std::size_t n = heap_.size();
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && before(heap_[child + 1], heap_[child])) ++child;
    if (!before(heap_[child], moving)) break;
    place(i, heap_[child]);
    i = child;
  }
  place(i, moving);
}

void ScheduleQueue::remove_at(std::size_t i) {
  const Slot removed = heap_[i];
  pos_[removed] = kAbsent;
  const Slot last = heap_.back();
  heap_.pop_back();
  if (i == heap_.size()) return;
  place(i, last);
  sift_up(i);
  sift_down(pos_[last]);
}

}  // namespace dflow
