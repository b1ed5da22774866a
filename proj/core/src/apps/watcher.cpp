#include "dflow/apps/watcher.hpp"

#include <utility>

namespace dflow::apps {

Watcher::Watcher(Engine& engine, Cell<ListNode> head, NextOf next_of, WatchFn watch, ReleaseFn release)
    : engine_(engine), next_of_(std::move(next_of)), watch_(std::move(watch)), release_(std::move(release)) {
  generator_ = create(kNoListNode, head);
  // The watcher itself holds the generator.
  shadows_[generator_].refc = 1;
}

Watcher::Watcher(ReactiveList& list, WatchFn watch, ReleaseFn release)
    : Watcher(
          list.engine(), list.head(), [&list](ListNode n) { return list.next_cell(n); }, std::move(watch),
          std::move(release)) {}

Watcher::~Watcher() { detach(); }

std::uint32_t Watcher::create(ListNode head, Cell<ListNode> tail) {
  std::uint32_t index;
  if (!free_.empty()) {
    index = free_.back();
    free_.pop_back();
  } else {
    index = static_cast<std::uint32_t>(shadows_.size());
    shadows_.emplace_back();
  }
  shadows_[index] = Shadow{head, tail, kNone, 0, ConstraintId{}, true};
  by_tail_[tail.id()] = index;
  ++live_;
  const ConstraintId id = engine_.new_constraint([this, index] { run(index); }, index);
  // In normal mode the constraint already ran; the record may have moved.
  shadows_[index].cons = id;
  return index;
}

void Watcher::run(std::uint32_t index) {
  const ListNode target = engine_.get(shadows_[index].tail);
  std::uint32_t cur_next = kNone;
  if (target != kNoListNode) {
    const Cell<ListNode> target_tail = next_of_(target);
    const auto it = by_tail_.find(target_tail.id());
    cur_next = it != by_tail_.end() ? it->second : create(target, target_tail);
  }

  Shadow& self = shadows_[index];
  if (self.next != cur_next) {
    if (self.next != kNone && --shadows_[self.next].refc == 0) {
      const std::uint32_t orphan = self.next;
      engine_.arm_final(shadows_[orphan].cons, [this, orphan](UserParam) { destroy(orphan); });
    }
    if (cur_next != kNone && shadows_[cur_next].refc++ == 0) {
      engine_.arm_final(shadows_[cur_next].cons, nullptr);
      // It skipped `watch` while orphaned.
      engine_.schedule(shadows_[cur_next].cons);
    }
    self.next = cur_next;
  }
  // An orphan waiting for reclamation no longer watches its node.
  if (self.head != kNoListNode && self.refc != 0) watch_(self.head);
}

void Watcher::destroy(std::uint32_t index) {
  // Iterative so that dropping a long chain does not recurse.
  while (index != kNone) {
    Shadow& s = shadows_[index];
    by_tail_.erase(s.tail.id());
    if (engine_.alive(s.cons)) engine_.del_constraint(s.cons);
    const ListNode head = s.head;
    const std::uint32_t next = s.next;
    s.alive = false;
    s.next = kNone;
    free_.push_back(index);
    --live_;
    if (release_ && head != kNoListNode) release_(head);
    index = (next != kNone && --shadows_[next].refc == 0) ? next : kNone;
  }
}

void Watcher::detach() {
  if (generator_ == kNone) return;
  const std::uint32_t gen = generator_;
  generator_ = kNone;
  shadows_[gen].refc = 0;
  destroy(gen);
  // Shadows waiting for their final handler are not reachable from the
  // generator any more.
  for (std::uint32_t i = 0; i < shadows_.size(); ++i) {
    if (shadows_[i].alive) {
      shadows_[i].refc = 0;
      shadows_[i].next = kNone;
      destroy(i);
    }
  }
}

std::vector<ListNode> Watcher::mirrored() const {
  std::vector<ListNode> out;
  if (generator_ == kNone) return out;
  for (std::uint32_t s = shadows_[generator_].next; s != kNone && out.size() <= live_; s = shadows_[s].next) {
    out.push_back(shadows_[s].head);
  }
  return out;
}

std::unique_ptr<Watcher> attach_repairer(ReactiveList& list) {
  Engine& e = list.engine();
  return std::make_unique<Watcher>(list, [&list, &e](ListNode x) {
    const ListNode succ = e.get(list.next_cell(x));
    if (succ == kNoListNode) return;
    if (e.get(list.prev_cell(succ)) != x) e.set(list.prev_cell(succ), x);
  });
}

}  // namespace dflow::apps
