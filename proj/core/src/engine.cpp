#include "dflow/engine.hpp"

#include <algorithm>
#include <string>

namespace dflow {

struct Engine::Slot {
  std::unique_ptr<detail::ValueBox> value;
  std::uint32_t generation = 0;
  bool alive = false;
  Stamp read_stamp = 0;
  Stamp write_stamp = 0;
  std::uint64_t block_epoch = 0;
  std::uint32_t dep_head = kNullIndex;
};

// One (cell, constraint) pair of the dependency relation. A node is stale
// once its constraint has executed again (or died) after it was inserted.
struct Engine::DepNode {
  std::uint32_t constraint = kNullIndex;
  std::uint32_t constraint_generation = 0;
  Stamp inserted = 0;
  std::uint32_t next = kNullIndex;
};

struct Engine::Record {
  Body body;
  UserParam param = 0;
  Stamp last_exec = 0;
  FinalHandler final_handler;
  std::uint64_t final_seq = 0;
  bool armed = false;
  bool alive = false;
  bool pending_delete = false;
  std::uint32_t generation = 0;
  std::uint64_t dep_count = 0;
  std::uint64_t seen_session = 0;
};

struct Engine::LogEntry {
  CellId cell;
  std::unique_ptr<detail::ValueBox> before;
};

struct Engine::FinalEntry {
  std::uint32_t constraint;
  std::uint64_t seq;
};

namespace {

std::string describe(CellId cell) {
  return "cell " + std::to_string(cell.index) + "#" + std::to_string(cell.generation);
}

std::string describe(ConstraintId id) {
  return "constraint " + std::to_string(id.index) + "#" + std::to_string(id.generation);
}

}  // namespace

Engine::Engine() : Engine(Options{}) {}

Engine::Engine(Options options) : options_(options) {
  if (options_.exec_budget == 0) throw Error(Errc::InvalidArgument, "execution budget must be positive");
}

Engine::~Engine() = default;

// Cells --------------------------------------------------------------------

CellId Engine::install(std::unique_ptr<detail::ValueBox> box) {
  if (probing_) probe_violation_ = true;
  std::uint32_t index;
  if (!free_slots_.empty()) {
    index = free_slots_.back();
    free_slots_.pop_back();
  } else {
    index = static_cast<std::uint32_t>(slots_.size());
    slots_.emplace_back();
  }
  Slot& slot = slots_[index];
  slot.value = std::move(box);
  slot.alive = true;
  slot.read_stamp = 0;
  slot.write_stamp = 0;
  slot.block_epoch = 0;
  slot.dep_head = kNullIndex;
  ++live_cells_;
  ++stats_.cells_allocated;
  return CellId{index, slot.generation};
}

Engine::Slot& Engine::checked_slot(CellId cell) {
  return const_cast<Slot&>(std::as_const(*this).checked_slot(cell));
}

const Engine::Slot& Engine::checked_slot(CellId cell) const {
  if (cell.index >= slots_.size()) throw Error(Errc::InvalidCell, describe(cell) + " was never allocated");
  const Slot& slot = slots_[cell.index];
  if (!slot.alive || slot.generation != cell.generation) {
    throw Error(Errc::InvalidCell, describe(cell) + " is not live");
  }
  return slot;
}

bool Engine::valid(CellId cell) const noexcept {
  return cell.index < slots_.size() && slots_[cell.index].alive && slots_[cell.index].generation == cell.generation;
}

void Engine::free(CellId cell) {
  if (cell.index >= slots_.size()) throw Error(Errc::InvalidCell, describe(cell) + " was never allocated");
  Slot& slot = slots_[cell.index];
  if (cell.generation < slot.generation || (cell.generation == slot.generation && !slot.alive)) {
    throw Error(Errc::DoubleFree, describe(cell) + " was already freed");
  }
  if (cell.generation != slot.generation) throw Error(Errc::InvalidCell, describe(cell) + " was never allocated");
  if (probing_) {
    probe_violation_ = true;
    return;
  }
  release_dep_list(cell.index);
  slot.value.reset();
  slot.alive = false;
  ++slot.generation;
  free_slots_.push_back(cell.index);
  --live_cells_;
  ++stats_.cells_freed;
}

void Engine::release_dep_list(std::uint32_t cell_index) {
  std::uint32_t n = slots_[cell_index].dep_head;
  while (n != kNullIndex) {
    DepNode& node = nodes_[n];
    const std::uint32_t next = node.next;
    if (!stale(node)) {
      --records_[node.constraint].dep_count;
      --current_nodes_;
    }
    node.constraint = kNullIndex;
    free_nodes_.push_back(n);
    --nodes_in_use_;
    n = next;
  }
  slots_[cell_index].dep_head = kNullIndex;
}

detail::ValueBox& Engine::read_box(CellId cell) {
  Slot& slot = checked_slot(cell);
  if (mode_ == Mode::Constraint && !probing_ && slot.read_stamp != global_stamp_) {
    slot.read_stamp = global_stamp_;
    std::uint32_t n;
    if (!free_nodes_.empty()) {
      n = free_nodes_.back();
      free_nodes_.pop_back();
    } else {
      n = static_cast<std::uint32_t>(nodes_.size());
      nodes_.emplace_back();
    }
    Record& rec = records_[current_];
    nodes_[n] = DepNode{current_, rec.generation, global_stamp_, slot.dep_head};
    slot.dep_head = n;
    ++rec.dep_count;
    ++current_nodes_;
    ++nodes_in_use_;
  }
  return *slot.value;
}

const detail::ValueBox& Engine::peek_box(CellId cell) const { return *checked_slot(cell).value; }

detail::ValueBox& Engine::write_target(CellId cell) { return *checked_slot(cell).value; }

bool Engine::deferred_write_mode() const noexcept { return mode_ == Mode::Constraint || atomic_depth_ > 0; }

void Engine::log_deferred_write(CellId cell, const detail::ValueBox& before) {
  Slot& slot = slots_[cell.index];
  if (mode_ == Mode::Constraint) {
    if (slot.write_stamp != global_stamp_) {
      slot.write_stamp = global_stamp_;
      write_log_.push_back(LogEntry{cell, before.clone()});
    }
    return;
  }
  if (slot.block_epoch != block_epoch_) {
    slot.block_epoch = block_epoch_;
    block_log_.push_back(LogEntry{cell, before.clone()});
  }
}

void Engine::propagate_change(CellId cell) {
  enqueue_dependents(cell.index);
  run_solver();
}

// Constraints ----------------------------------------------------------------

Engine::Record& Engine::record(ConstraintId id) {
  return const_cast<Record&>(std::as_const(*this).record(id));
}

const Engine::Record& Engine::record(ConstraintId id) const {
  if (id.index >= records_.size()) throw Error(Errc::InvalidConstraint, describe(id) + " does not exist");
  const Record& rec = records_[id.index];
  if (!rec.alive || rec.pending_delete || rec.generation != id.generation) {
    throw Error(Errc::InvalidConstraint, describe(id) + " is not live");
  }
  return rec;
}

bool Engine::alive(ConstraintId id) const noexcept {
  return id.index < records_.size() && records_[id.index].alive && !records_[id.index].pending_delete &&
         records_[id.index].generation == id.generation;
}

ConstraintId Engine::create_constraint(Body body, UserParam param) {
  if (probing_) {
    probe_violation_ = true;
    return ConstraintId{};
  }
  std::uint32_t index;
  if (!free_records_.empty()) {
    index = free_records_.back();
    free_records_.pop_back();
  } else {
    index = static_cast<std::uint32_t>(records_.size());
    records_.emplace_back();
  }
  Record& rec = records_[index];
  rec.body = std::move(body);
  rec.param = param;
  rec.last_exec = 0;
  rec.final_handler = nullptr;
  rec.armed = false;
  rec.alive = true;
  rec.pending_delete = false;
  rec.dep_count = 0;
  rec.seen_session = 0;
  ++live_constraints_;
  ++stats_.constraints_created;
  const ConstraintId id{index, rec.generation};

  enqueue(index);
  if (mode_ == Mode::Normal && atomic_depth_ == 0 && !in_solver_) run_solver();
  return id;
}

void Engine::del_constraint(ConstraintId id) {
  Record& rec = record(id);
  if (probing_) {
    probe_violation_ = true;
    return;
  }
  queue_.erase(id.index);
  rec.armed = false;
  rec.final_handler = nullptr;
  if (id.index == current_) {
    rec.pending_delete = true;
    return;
  }
  retire(id.index);
}

void Engine::retire(std::uint32_t index) {
  Record& rec = records_[index];
  current_nodes_ -= rec.dep_count;
  rec.dep_count = 0;
  rec.alive = false;
  rec.pending_delete = false;
  rec.armed = false;
  rec.body = nullptr;
  rec.final_handler = nullptr;
  ++rec.generation;
  free_records_.push_back(index);
  --live_constraints_;
  ++stats_.constraints_deleted;
}

void Engine::arm_final(ConstraintId id, FinalHandler handler) {
  Record& rec = record(id);
  if (probing_) {
    probe_violation_ = true;
    return;
  }
  if (!handler) {
    rec.armed = false;
    rec.final_handler = nullptr;
    return;
  }
  rec.final_handler = std::move(handler);
  if (!rec.armed) {
    rec.armed = true;
    rec.final_seq = ++final_seq_;
    final_queue_.push_back(FinalEntry{id.index, rec.final_seq});
  }
}

bool Engine::schedule(ConstraintId id) {
  if (!alive(id)) return false;
  if (probing_) {
    probe_violation_ = true;
    return false;
  }
  const bool inserted = !queue_.contains(id.index);
  enqueue(id.index);
  if (mode_ == Mode::Normal && atomic_depth_ == 0 && !in_solver_) run_solver();
  return inserted;
}

UserParam Engine::param(ConstraintId id) const { return record(id).param; }

Stamp Engine::last_exec_stamp(ConstraintId id) const { return record(id).last_exec; }

std::optional<ConstraintId> Engine::current() const noexcept {
  if (current_ == kNullIndex) return std::nullopt;
  return ConstraintId{current_, records_[current_].generation};
}

void Engine::set_exec_budget(std::uint64_t budget) {
  if (budget == 0) throw Error(Errc::InvalidArgument, "execution budget must be positive");
  options_.exec_budget = budget;
}

// Scheduling ---------------------------------------------------------------

void Engine::enqueue(std::uint32_t index) {
  const Record& rec = records_[index];
  if (!rec.alive || rec.pending_delete) return;
  if (!queue_.push(index, rec.last_exec, rec.param) &&
      queue_.comparator().kind() == Comparator::Kind::UserParam) {
    queue_.reprioritize(index);
  }
}

bool Engine::stale(const DepNode& node) const noexcept {
  const Record& rec = records_[node.constraint];
  return !rec.alive || rec.generation != node.constraint_generation || node.inserted < rec.last_exec;
}

void Engine::enqueue_dependents(std::uint32_t cell_index) {
  std::uint32_t prev = kNullIndex;
  std::uint32_t n = slots_[cell_index].dep_head;
  while (n != kNullIndex) {
    DepNode& node = nodes_[n];
    const std::uint32_t next = node.next;
    if (stale(node)) {
      if (prev == kNullIndex) slots_[cell_index].dep_head = next;
      else nodes_[prev].next = next;
      node.constraint = kNullIndex;
      free_nodes_.push_back(n);
      --nodes_in_use_;
      ++stats_.stale_collected;
    } else {
      enqueue(node.constraint);
      prev = n;
    }
    n = next;
  }
}

void Engine::set_comparator(Comparator cmp) {
  if (mode_ != Mode::Normal || in_solver_ || !queue_.empty()) {
    throw Error(Errc::QueueNotEmpty, "comparator can only change between solver sessions");
  }
  queue_.set_comparator(std::move(cmp));
}

const Comparator& Engine::comparator() const noexcept { return queue_.comparator(); }

// Atomic blocks ----------------------------------------------------------

void Engine::begin_atomic() {
  if (mode_ == Mode::Constraint) {
    ++nested_in_constraint_;
    return;
  }
  if (atomic_depth_ == 0) ++block_epoch_;
  ++atomic_depth_;
}

void Engine::end_atomic() {
  if (mode_ == Mode::Constraint) {
    if (nested_in_constraint_ == 0) throw Error(Errc::UnbalancedAtomic, "end_atomic without begin_atomic");
    --nested_in_constraint_;
    return;
  }
  if (atomic_depth_ <= handler_floor_) throw Error(Errc::UnbalancedAtomic, "end_atomic without begin_atomic");
  if (--atomic_depth_ > 0) return;
  flush_block_log();
  run_solver();
}

void Engine::abandon_atomic() noexcept {
  try {
    end_atomic();
  } catch (...) {
  }
}

void Engine::flush_block_log() {
  for (const LogEntry& entry : block_log_) {
    if (!valid(entry.cell)) continue;
    if (!slots_[entry.cell.index].value->same_as(*entry.before)) enqueue_dependents(entry.cell.index);
  }
  block_log_.clear();
}

// Solver -------------------------------------------------------------------

void Engine::run_solver() {
  if (in_solver_) return;
  if (queue_.empty() && final_queue_.empty()) return;
  in_solver_ = true;
  ++session_serial_;
  session_execs_ = 0;
  ++stats_.sessions;
  stats_.executions_last_session = 0;
  stats_.distinct_constraints_last_session = 0;
  stats_.last_session_failed = false;
  try {
    for (;;) {
      while (auto slot = queue_.pop()) execute(*slot);
      if (final_queue_.empty()) break;
      run_final_handlers();
    }
  } catch (...) {
    abort_session();
    throw;
  }
  in_solver_ = false;
  auto_collect();
}

void Engine::execute(std::uint32_t index) {
  if (++session_execs_ > options_.exec_budget) {
    throw Error(Errc::SolverBudgetExceeded,
                "session exceeded " + std::to_string(options_.exec_budget) + " constraint executions");
  }
  Record& rec = records_[index];
  if (rec.seen_session != session_serial_) {
    rec.seen_session = session_serial_;
    ++stats_.distinct_constraints_last_session;
  }
  ++stats_.constraints_executed;
  ++stats_.executions_last_session;

  ++global_stamp_;
  current_nodes_ -= rec.dep_count;
  rec.dep_count = 0;
  rec.last_exec = global_stamp_;
  if (observer_) observer_(ConstraintId{index, rec.generation});

  Body body = std::move(rec.body);
  const UserParam param = rec.param;
  mode_ = Mode::Constraint;
  current_ = index;
  nested_in_constraint_ = 0;
  try {
    body(param);
  } catch (...) {
    mode_ = Mode::Normal;
    current_ = kNullIndex;
    write_log_.clear();
    if (records_[index].pending_delete) retire(index);
    else records_[index].body = std::move(body);
    throw;
  }
  mode_ = Mode::Normal;
  current_ = kNullIndex;

  Record& done = records_[index];
  if (done.pending_delete) retire(index);
  else done.body = std::move(body);

  for (const LogEntry& entry : write_log_) {
    if (!valid(entry.cell)) continue;
    if (!slots_[entry.cell.index].value->same_as(*entry.before)) enqueue_dependents(entry.cell.index);
  }
  write_log_.clear();
}

void Engine::run_final_handlers() {
  mode_ = Mode::FinalHandlers;
  ++atomic_depth_;
  ++block_epoch_;
  handler_floor_ = 1;
  try {
    // Handlers may arm further handlers; those are appended and run too.
    for (std::size_t i = 0; i < final_queue_.size(); ++i) {
      const FinalEntry entry = final_queue_[i];
      Record& rec = records_[entry.constraint];
      if (!rec.alive || rec.pending_delete || !rec.armed || rec.final_seq != entry.seq) continue;
      if (++session_execs_ > options_.exec_budget) {
        throw Error(Errc::SolverBudgetExceeded, "final handlers exceeded the execution budget");
      }
      rec.armed = false;
      FinalHandler handler = std::move(rec.final_handler);
      rec.final_handler = nullptr;
      handler(rec.param);
    }
  } catch (...) {
    final_queue_.clear();
    block_log_.clear();
    handler_floor_ = 0;
    atomic_depth_ = 0;
    mode_ = Mode::Normal;
    throw;
  }
  final_queue_.clear();
  handler_floor_ = 0;
  --atomic_depth_;
  mode_ = Mode::Normal;
  flush_block_log();
}

void Engine::abort_session() {
  queue_.clear();
  write_log_.clear();
  for (const FinalEntry& entry : final_queue_) {
    records_[entry.constraint].armed = false;
    records_[entry.constraint].final_handler = nullptr;
  }
  final_queue_.clear();
  mode_ = Mode::Normal;
  current_ = kNullIndex;
  in_solver_ = false;
  stats_.last_session_failed = true;
}

// Stale dependency collection ------------------------------------------------

std::size_t Engine::collect_stale(std::size_t limit) {
  if (mode_ != Mode::Normal || in_solver_ || slots_.empty()) return 0;
  std::size_t scanned = 0;
  std::size_t removed = 0;
  std::size_t visited_cells = 0;
  while (scanned < limit && visited_cells < slots_.size()) {
    if (gc_cursor_ >= slots_.size()) gc_cursor_ = 0;
    Slot& slot = slots_[gc_cursor_];
    if (slot.alive) {
      std::uint32_t prev = kNullIndex;
      std::uint32_t n = slot.dep_head;
      while (n != kNullIndex) {
        DepNode& node = nodes_[n];
        const std::uint32_t next = node.next;
        ++scanned;
        if (stale(node)) {
          if (prev == kNullIndex) slot.dep_head = next;
          else nodes_[prev].next = next;
          node.constraint = kNullIndex;
          free_nodes_.push_back(n);
          --nodes_in_use_;
          ++removed;
        } else {
          prev = n;
        }
        n = next;
      }
    }
    ++gc_cursor_;
    ++visited_cells;
  }
  stats_.stale_collected += removed;
  return removed;
}

void Engine::auto_collect() {
  const std::uint64_t stale_nodes = nodes_in_use_ - current_nodes_;
  if (stale_nodes > current_nodes_ && stale_nodes > options_.gc_batch) {
    collect_stale(std::max<std::size_t>(options_.gc_batch, stale_nodes));
  }
}

// Fixpoint probe -------------------------------------------------------------

FixpointReport Engine::check_fixpoint() {
  if (mode_ != Mode::Normal || in_solver_ || atomic_depth_ != 0 || !queue_.empty()) {
    throw Error(Errc::QueueNotEmpty, "fixpoint checks require a quiescent engine");
  }
  FixpointReport report;
  for (std::uint32_t index = 0; index < records_.size(); ++index) {
    if (!records_[index].alive) continue;
    ++report.constraints_checked;
    Body body = std::move(records_[index].body);
    const UserParam param = records_[index].param;

    ++global_stamp_;
    probing_ = true;
    probe_violation_ = false;
    mode_ = Mode::Constraint;
    current_ = index;
    nested_in_constraint_ = 0;
    bool threw = false;
    try {
      body(param);
    } catch (...) {
      threw = true;
    }
    mode_ = Mode::Normal;
    current_ = kNullIndex;
    probing_ = false;
    records_[index].body = std::move(body);

    bool changed = probe_violation_ || threw;
    // Restore in reverse so the oldest snapshot wins.
    for (auto it = write_log_.rbegin(); it != write_log_.rend(); ++it) {
      if (!valid(it->cell)) continue;
      auto& value = *slots_[it->cell.index].value;
      if (!value.same_as(*it->before)) {
        changed = true;
        value.assign_from(*it->before);
      }
    }
    write_log_.clear();
    if (changed) {
      report.ok = false;
      ++report.violations;
      if (!report.first_violation) report.first_violation = ConstraintId{index, records_[index].generation};
    }
  }
  return report;
}

ExecStats Engine::stats() const noexcept {
  ExecStats s = stats_;
  s.dependencies_live = nodes_in_use_;
  s.dependencies_current = current_nodes_;
  return s;
}

}  // namespace dflow
