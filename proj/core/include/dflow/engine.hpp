#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "dflow/comparator.hpp"
#include "dflow/errors.hpp"
#include "dflow/handles.hpp"
#include "dflow/schedule_queue.hpp"

namespace dflow {

namespace detail {

class ValueBox {
 public:
  virtual ~ValueBox() = default;
  virtual std::unique_ptr<ValueBox> clone() const = 0;
  virtual bool same_as(const ValueBox& other) const = 0;
  virtual void assign_from(const ValueBox& other) = 0;
};

template <class T>
class TypedValue : public ValueBox {
 public:
  explicit TypedValue(T v) : value(std::move(v)) {}
  virtual bool equals(const T& other) const = 0;

  T value;
};

template <class T, class Eq>
class TypedBox final : public TypedValue<T> {
 public:
  TypedBox(T v, Eq eq) : TypedValue<T>(std::move(v)), eq_(std::move(eq)) {}

  std::unique_ptr<ValueBox> clone() const override { return std::make_unique<TypedBox>(this->value, eq_); }
  bool same_as(const ValueBox& other) const override {
    return eq_(this->value, static_cast<const TypedValue<T>&>(other).value);
  }
  void assign_from(const ValueBox& other) override {
    this->value = static_cast<const TypedValue<T>&>(other).value;
  }
  bool equals(const T& other) const override { return eq_(this->value, other); }

 private:
  Eq eq_;
};

}  // namespace detail

enum class Mode { Normal, Constraint, FinalHandlers };

struct ExecStats {
  std::uint64_t constraints_executed = 0;
  std::uint64_t executions_last_session = 0;
  std::uint64_t distinct_constraints_last_session = 0;
  std::uint64_t dependencies_live = 0;      // dependency nodes currently allocated
  std::uint64_t dependencies_current = 0;   // nodes logged by the latest executions
  std::uint64_t stale_collected = 0;
  std::uint64_t sessions = 0;
  std::uint64_t constraints_created = 0;
  std::uint64_t constraints_deleted = 0;
  std::uint64_t cells_allocated = 0;
  std::uint64_t cells_freed = 0;
  bool last_session_failed = false;
};

struct FixpointReport {
  bool ok = true;
  std::size_t constraints_checked = 0;
  std::size_t violations = 0;
  std::optional<ConstraintId> first_violation;
};

/// One-way dataflow constraint engine over reactive cells.
///
/// Reads of a cell from inside a constraint body record a dependency; a write
/// that changes a cell re-executes every constraint depending on it, until
/// the queue empties. The engine is single-threaded and not movable because
/// constraint bodies usually capture it by reference.
class Engine {
 public:
  using Body = std::function<void(UserParam)>;
  using FinalHandler = std::function<void(UserParam)>;
  using ExecObserver = std::function<void(ConstraintId)>;

  struct Options {
    std::uint64_t exec_budget = 10'000'000;
    /// Nodes scanned by the automatic stale-dependency sweep after a session.
    std::size_t gc_batch = 1024;
  };

  Engine();
  explicit Engine(Options options);
  ~Engine();

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // Cells --------------------------------------------------------------

  template <class T, class Eq = std::equal_to<T>>
  Cell<T> alloc(T initial, Eq eq = Eq{}) {
    return Cell<T>(install(std::make_unique<detail::TypedBox<T, Eq>>(std::move(initial), std::move(eq))));
  }

  void free(CellId cell);
  template <class T>
  void free(Cell<T> cell) {
    free(cell.id());
  }

  bool valid(CellId cell) const noexcept;

  /// Reads a cell. Inside a constraint body the read is recorded as a
  /// dependency of the running constraint. The reference stays valid until
  /// the next write to or free of the cell.
  template <class T>
  const T& get(Cell<T> cell) {
    return static_cast<const detail::TypedValue<T>&>(read_box(cell.id())).value;
  }

  /// Reads a cell without recording a dependency in any mode.
  template <class T>
  const T& peek(Cell<T> cell) const {
    return static_cast<const detail::TypedValue<T>&>(peek_box(cell.id())).value;
  }

  template <class T>
  void set(Cell<T> cell, T value) {
    auto& box = static_cast<detail::TypedValue<T>&>(write_target(cell.id()));
    if (deferred_write_mode()) {
      log_deferred_write(cell.id(), box);
      box.value = std::move(value);
      return;
    }
    const bool changed = !box.equals(value);
    box.value = std::move(value);
    if (changed) propagate_change(cell.id());
  }

  // Constraints --------------------------------------------------------

  /// Creates a constraint. In non-atomic normal mode the body runs at once
  /// and any cascade completes before returning; otherwise the first run is
  /// deferred to the current or next solver session.
  template <class F>
  ConstraintId new_constraint(F&& body, UserParam param = 0) {
    if constexpr (std::is_invocable_v<F&, UserParam>) {
      return create_constraint(Body(std::forward<F>(body)), param);
    } else {
      return create_constraint(Body([fn = std::forward<F>(body)](UserParam) mutable { fn(); }), param);
    }
  }

  void del_constraint(ConstraintId id);
  bool alive(ConstraintId id) const noexcept;

  /// Arms `handler` to run once when the current (or next) session reaches
  /// its fixpoint. An empty handler cancels a previous request.
  void arm_final(ConstraintId id, FinalHandler handler);

  /// Forces `id` into the schedule queue. Returns true iff newly queued (a
  /// dead id is ignored); in non-atomic normal mode the solver runs before
  /// returning.
  bool schedule(ConstraintId id);

  UserParam param(ConstraintId id) const;
  Stamp last_exec_stamp(ConstraintId id) const;

  // Atomic blocks --------------------------------------------------------

  void begin_atomic();
  void end_atomic();

  class AtomicBlock {
   public:
    explicit AtomicBlock(Engine& engine) : engine_(engine) { engine_.begin_atomic(); }
    ~AtomicBlock() noexcept(false) {
      if (std::uncaught_exceptions() == 0) engine_.end_atomic();
      else engine_.abandon_atomic();
    }
    AtomicBlock(const AtomicBlock&) = delete;
    AtomicBlock& operator=(const AtomicBlock&) = delete;

   private:
    Engine& engine_;
  };

  // Scheduling and bookkeeping -----------------------------------------

  void set_comparator(Comparator cmp);
  const Comparator& comparator() const noexcept;

  /// Scans up to `limit` dependency nodes and unlinks the stale ones.
  std::size_t collect_stale(std::size_t limit);

  /// Re-runs every live constraint with writes rolled back and structural
  /// calls suppressed; reports constraints whose run would change a cell.
  FixpointReport check_fixpoint();

  ExecStats stats() const noexcept;
  Mode mode() const noexcept { return mode_; }
  std::size_t atomic_depth() const noexcept { return atomic_depth_; }
  std::size_t queue_size() const noexcept { return queue_.size(); }
  std::optional<ConstraintId> current() const noexcept;
  std::size_t live_constraints() const noexcept { return live_constraints_; }
  std::size_t live_cells() const noexcept { return live_cells_; }

  void set_exec_budget(std::uint64_t budget);
  std::uint64_t exec_budget() const noexcept { return options_.exec_budget; }

  /// Called with the id of every constraint right before its body runs.
  void set_exec_observer(ExecObserver observer) { observer_ = std::move(observer); }

 private:
  struct Slot;
  struct DepNode;
  struct Record;
  struct LogEntry;
  struct FinalEntry;

  CellId install(std::unique_ptr<detail::ValueBox> box);
  detail::ValueBox& read_box(CellId cell);
  const detail::ValueBox& peek_box(CellId cell) const;
  detail::ValueBox& write_target(CellId cell);
  bool deferred_write_mode() const noexcept;
  void log_deferred_write(CellId cell, const detail::ValueBox& before);
  void propagate_change(CellId cell);

  ConstraintId create_constraint(Body body, UserParam param);
  Record& record(ConstraintId id);
  const Record& record(ConstraintId id) const;
  void retire(std::uint32_t index);

  void enqueue(std::uint32_t index);
  void enqueue_dependents(std::uint32_t cell_index);
  bool stale(const DepNode& node) const noexcept;
  void release_dep_list(std::uint32_t cell_index);

  void run_solver();
  void execute(std::uint32_t index);
  void run_final_handlers();
  void flush_block_log();
  void abort_session();
  void abandon_atomic() noexcept;
  void auto_collect();

  Slot& checked_slot(CellId cell);
  const Slot& checked_slot(CellId cell) const;

  Options options_;
  Mode mode_ = Mode::Normal;
  bool probing_ = false;
  bool probe_violation_ = false;
  bool in_solver_ = false;
  std::size_t atomic_depth_ = 0;
  std::size_t nested_in_constraint_ = 0;
  std::size_t handler_floor_ = 0;
  Stamp global_stamp_ = 0;
  std::uint64_t block_epoch_ = 0;
  std::uint32_t current_ = kNullIndex;

  std::vector<Slot> slots_;
  std::vector<std::uint32_t> free_slots_;
  std::vector<DepNode> nodes_;
  std::vector<std::uint32_t> free_nodes_;
  std::vector<Record> records_;
  std::vector<std::uint32_t> free_records_;
  std::vector<LogEntry> write_log_;
  std::vector<LogEntry> block_log_;
  std::vector<FinalEntry> final_queue_;
  ScheduleQueue queue_;

  std::size_t live_cells_ = 0;
  std::size_t live_constraints_ = 0;
  std::uint64_t session_execs_ = 0;
  std::uint64_t session_serial_ = 0;
  std::uint32_t gc_cursor_ = 0;
  std::uint64_t final_seq_ = 0;
  std::uint64_t nodes_in_use_ = 0;
  std::uint64_t current_nodes_ = 0;
  ExecStats stats_;
  ExecObserver observer_;
};

}  // namespace dflow
