#include "dflow/apps/observer.hpp"

namespace dflow::apps {

Counter::Counter(Engine& engine, int initial) : engine_(&engine), cell_(engine.alloc<int>(initial)) {}

Counter::~Counter() {
  if (engine_->valid(cell_.id())) engine_->free(cell_);
}

ConstraintId connect(Engine& engine, const Counter& subject, Counter& observer) {
  return engine.new_constraint([&subject, &observer] { observer.set_value(subject.value()); });
}

}  // namespace dflow::apps
