#pragma once

#include "dflow/engine.hpp"

namespace dflow::apps {

/// A counter whose value lives in a reactive cell. Subjects need no
/// signal/slot machinery: a constraint reading value() observes it.
class Counter {
 public:
  explicit Counter(Engine& engine, int initial = 0);
  ~Counter();

  Counter(const Counter&) = delete;
  Counter& operator=(const Counter&) = delete;

  int value() const { return engine_->get(cell_); }
  void set_value(int value) { engine_->set(cell_, value); }

  Cell<int> cell() const noexcept { return cell_; }

 private:
  Engine* engine_;
  Cell<int> cell_;
};

/// Keeps `observer` equal to `subject`. Writes to `observer` never flow back.
ConstraintId connect(Engine& engine, const Counter& subject, Counter& observer);

}  // namespace dflow::apps
