#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dflow/apps/reactive_list.hpp"
#include "dflow/bench/dimacs.hpp"
#include "dflow/engine.hpp"

namespace dflow::bench {

struct WorkloadOptions {
  std::uint64_t seed = 1;
  /// Share of list updates that insert or remove a node instead of
  /// changing a value.
  double structural_ratio = 0.5;
  /// Rows per constraint block in vecmat.
  std::size_t vecmat_block = 1;
};

/// A reactive computation plus the host-side mirror needed to recompute its
/// output from scratch.
class Workload {
 public:
  virtual ~Workload() = default;

  virtual std::string_view name() const = 0;

  /// Creates the input of size n and the constraint network over it.
  virtual void build(std::size_t n) = 0;

  /// Applies one random update. May run inside an atomic block.
  virtual void update() = 0;

  /// Host cleanup once the session covering the last updates is over.
  virtual void settle() {}

  /// Compares the reactive output against a from-scratch recomputation and
  /// describes the first mismatch.
  virtual std::optional<std::string> verify() const = 0;
  /// Snapshot of the reactive output, read without tracking.
  virtual std::vector<std::vector<std::int64_t>> outputs() const = 0;

  /// Workload-specific comparator for the `mindist` scheduler, if any.
  virtual std::optional<Comparator> min_distance_comparator() const { return std::nullopt; }
};

const std::vector<std::string>& workload_names();
bool is_list_workload(std::string_view name);

/// Throws Error(InvalidArgument) for an unknown name.
std::unique_ptr<Workload> make_workload(std::string_view name, Engine& engine, const WorkloadOptions& options);

/// Shortest paths over a fixed graph; updates halve a random edge weight.
std::unique_ptr<Workload> make_sp_workload(Engine& engine, DimacsGraph graph, const WorkloadOptions& options);

/// Base of the list benchmarks: owns the input lists and their host mirrors
/// and applies value changes, insertions and removals at uniform positions.
class ListWorkload : public Workload {
 public:
  ListWorkload(Engine& engine, const WorkloadOptions& options);
  ~ListWorkload() override;

  void build(std::size_t n) override;
  void update() override;
  void settle() override;

  std::size_t list_count() const noexcept { return lists_.size(); }
  std::size_t length(std::size_t list) const { return order_.at(list).size(); }
  std::span<const std::int64_t> mirror(std::size_t list) const { return values_.at(list); }
  std::span<const apps::ListNode> mirror_nodes(std::size_t list) const { return order_.at(list); }
  apps::ReactiveList& input(std::size_t list) { return *lists_.at(list); }

  void set_value_at(std::size_t list, std::size_t pos, std::int64_t value);
  void insert_at(std::size_t list, std::size_t pos, std::int64_t value);
  void remove_at(std::size_t list, std::size_t pos);

  /// Bounds that keep a sorted input sorted when position `pos` takes a new
  /// value (`inserting` selects the gap before `pos`).
  std::pair<std::int64_t, std::int64_t> sorted_bounds(std::size_t list, std::size_t pos, bool inserting) const;

 protected:
  virtual std::size_t input_count() const { return 1; }
  virtual bool sorted_inputs() const { return false; }
  /// Installs the constraint network once the inputs exist. Subclasses
  /// tear it down in their destructor, before the inputs are freed.
  virtual void attach() = 0;

  Engine& engine_;
  std::mt19937_64 rng_;
  double structural_ratio_;

 private:
  std::int64_t random_value();

  std::size_t target_ = 0;
  std::vector<std::unique_ptr<apps::ReactiveList>> lists_;
  std::vector<std::vector<apps::ListNode>> order_;
  std::vector<std::vector<std::int64_t>> values_;
  std::vector<std::pair<std::size_t, apps::ListNode>> pending_release_;
};

inline constexpr std::int64_t kValueRange = 1'000'000;

/// Deterministic per-node coin used by halver.
std::uint64_t node_hash(apps::ListNode node) noexcept;

}  // namespace dflow::bench
