#include <algorithm>
#include <functional>
#include <string>

#include "dflow/apps/watcher.hpp"
#include "dflow/bench/oracles.hpp"
#include "dflow/bench/workloads.hpp"

namespace dflow::bench {

using apps::kNoListNode;
using apps::ListNode;
using apps::ReactiveList;
using apps::Watcher;

std::uint64_t node_hash(ListNode node) noexcept {
  std::uint64_t z = node + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ListWorkload::ListWorkload(Engine& engine, const WorkloadOptions& options)
    : engine_(engine), rng_(options.seed), structural_ratio_(options.structural_ratio) {}

ListWorkload::~ListWorkload() = default;

std::int64_t ListWorkload::random_value() {
  return std::uniform_int_distribution<std::int64_t>(-kValueRange, kValueRange)(rng_);
}

void ListWorkload::build(std::size_t n) {
  const std::size_t count = input_count();
  target_ = std::max<std::size_t>(1, n / count);
  for (std::size_t l = 0; l < count; ++l) {
    const std::size_t len = l == 0 ? n - (count - 1) * (n / count) : n / count;
    std::vector<std::int64_t> values(len);
    for (auto& v : values) v = random_value();
    if (sorted_inputs()) std::sort(values.begin(), values.end());
    lists_.push_back(std::make_unique<ReactiveList>(engine_));
    order_.push_back(lists_.back()->append(values));
    values_.push_back(std::move(values));
  }
  attach();
}

std::pair<std::int64_t, std::int64_t> ListWorkload::sorted_bounds(std::size_t list, std::size_t pos,
                                                                  bool inserting) const {
  const auto& vals = values_.at(list);
  const std::int64_t lo = pos > 0 ? vals[pos - 1] : -kValueRange;
  const std::size_t upper = inserting ? pos : pos + 1;
  const std::int64_t hi = upper < vals.size() ? vals[upper] : kValueRange;
  return {lo, hi};
}

void ListWorkload::update() {
  const std::size_t l = std::uniform_int_distribution<std::size_t>(0, lists_.size() - 1)(rng_);
  const std::size_t size = order_[l].size();
  const bool structural = size == 0 || std::uniform_real_distribution<double>(0, 1)(rng_) < structural_ratio_;
  auto value_for = [&](std::size_t pos, bool inserting) {
    if (!sorted_inputs()) return random_value();
    const auto [lo, hi] = sorted_bounds(l, pos, inserting);
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  };
  if (!structural) {
    const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, size - 1)(rng_);
    set_value_at(l, pos, value_for(pos, false));
    return;
  }
  bool insert = std::uniform_int_distribution<int>(0, 1)(rng_) == 0;
  if (size <= 1) insert = true;
  if (size >= 2 * target_) insert = false;
  if (insert) {
    const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, size)(rng_);
    insert_at(l, pos, value_for(pos, true));
  } else {
    remove_at(l, std::uniform_int_distribution<std::size_t>(0, size - 1)(rng_));
  }
}

void ListWorkload::set_value_at(std::size_t list, std::size_t pos, std::int64_t value) {
  lists_.at(list)->set_value(order_[list].at(pos), value);
  values_[list][pos] = value;
}

void ListWorkload::insert_at(std::size_t list, std::size_t pos, std::int64_t value) {
  auto& order = order_.at(list);
  const ListNode pred = pos == 0 ? kNoListNode : order.at(pos - 1);
  const ListNode node = lists_[list]->insert_after(pred, value);
  order.insert(order.begin() + static_cast<std::ptrdiff_t>(pos), node);
  values_[list].insert(values_[list].begin() + static_cast<std::ptrdiff_t>(pos), value);
}

void ListWorkload::remove_at(std::size_t list, std::size_t pos) {
  auto& order = order_.at(list);
  const ListNode pred = pos == 0 ? kNoListNode : order.at(pos - 1);
  const ListNode victim = lists_[list]->remove_after(pred);
  if (victim != order.at(pos)) throw Error(Errc::VerificationFailed, "list mirror out of sync");
  order.erase(order.begin() + static_cast<std::ptrdiff_t>(pos));
  values_[list].erase(values_[list].begin() + static_cast<std::ptrdiff_t>(pos));
  pending_release_.emplace_back(list, victim);
}

void ListWorkload::settle() {
  if (engine_.atomic_depth() != 0) return;
  for (const auto& [list, node] : pending_release_) lists_[list]->release(node);
  pending_release_.clear();
}

namespace {

std::string mismatch_text(const char* what, std::ptrdiff_t index, std::span<const std::int64_t> expected,
                          std::span<const std::int64_t> actual) {
  const auto i = static_cast<std::size_t>(index);
  std::string out = std::string(what) + " index " + std::to_string(index) + ": expected ";
  out += i < expected.size() ? std::to_string(expected[i]) : "end";
  out += ", got ";
  out += i < actual.size() ? std::to_string(actual[i]) : "end";
  return out;
}

std::optional<std::string> compare(const char* what, std::span<const std::int64_t> expected,
                                   std::span<const std::int64_t> actual) {
  const auto i = first_mismatch(expected, actual);
  if (i < 0) return std::nullopt;
  return mismatch_text(what, i, expected, actual);
}

// ---------------------------------------------------------------------------

class Adder final : public ListWorkload {
 public:
  using ListWorkload::ListWorkload;
  ~Adder() override {
    watcher_.reset();
    if (engine_.valid(sum_.id())) engine_.free(sum_);
  }

  std::string_view name() const override { return "adder"; }

  std::optional<std::string> verify() const override {
    const std::int64_t expected = list_sum(mirror(0));
    const std::int64_t actual = engine_.peek(sum_);
    if (expected == actual) return std::nullopt;
    return "sum: expected " + std::to_string(expected) + ", got " + std::to_string(actual);
  }

  std::vector<std::vector<std::int64_t>> outputs() const override { return {{engine_.peek(sum_)}}; }

 protected:
  void attach() override {
    sum_ = engine_.alloc<std::int64_t>(0);
    watcher_ = std::make_unique<Watcher>(
        input(0), [this](ListNode x) { watch(x); }, [this](ListNode x) { drop(x); });
  }

 private:
  void watch(ListNode x) {
    if (x >= last_.size()) last_.resize(x + 1, 0);
    const std::int64_t v = engine_.get(input(0).val_cell(x));
    const std::int64_t delta = wrap_add(v, -last_[x]);
    if (delta == 0) return;
    last_[x] = v;
    engine_.set(sum_, wrap_add(engine_.peek(sum_), delta));
  }

  void drop(ListNode x) {
    if (last_[x] != 0) engine_.set(sum_, wrap_add(engine_.peek(sum_), -last_[x]));
    last_[x] = 0;
  }

  Cell<std::int64_t> sum_;
  std::vector<std::int64_t> last_;
  std::unique_ptr<Watcher> watcher_;
};

// ---------------------------------------------------------------------------

// Routes every node to one of k output lists (or drops it) and links each
// output list through per-node cells. link(x)[c] is the first node at or
// after x that goes to list c, so an output node's successor is
// link(next(x))[class(x)].
class Partition final : public ListWorkload {
 public:
  using Classify = std::function<std::size_t(ListNode, std::int64_t)>;
  using Transform = std::function<std::int64_t(std::int64_t)>;

  Partition(Engine& engine, const WorkloadOptions& options, std::string name, std::size_t k, Classify classify,
            Transform transform)
      : ListWorkload(engine, options),
        name_(std::move(name)),
        k_(k),
        classify_(std::move(classify)),
        transform_(std::move(transform)) {}

  ~Partition() override {
    if (engine_.alive(head_cons_)) engine_.del_constraint(head_cons_);
    watcher_.reset();
    for (ListNode x = 0; x < has_.size(); ++x) {
      if (has_[x]) drop(x);
    }
    for (auto c : out_head_) engine_.free(c);
  }

  std::string_view name() const override { return name_; }

  std::optional<std::string> verify() const override {
    const auto nodes = mirror_nodes(0);
    const auto values = mirror(0);
    for (std::size_t c = 0; c < k_; ++c) {
      std::vector<std::int64_t> expected;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (classify_(nodes[i], values[i]) == c) expected.push_back(transform_(values[i]));
      }
      const std::string what = "output list " + std::to_string(c);
      if (auto m = compare(what.c_str(), expected, output_list(c, nodes.size()))) return m;
    }
    return std::nullopt;
  }

  std::vector<std::vector<std::int64_t>> outputs() const override {
    std::vector<std::vector<std::int64_t>> out;
    for (std::size_t c = 0; c < k_; ++c) out.push_back(output_list(c, length(0)));
    return out;
  }

 protected:
  void attach() override {
    for (std::size_t c = 0; c < k_; ++c) out_head_.push_back(engine_.alloc<ListNode>(kNoListNode));
    watcher_ = std::make_unique<Watcher>(
        input(0), [this](ListNode x) { watch(x); }, [this](ListNode x) { drop(x); });
    head_cons_ = engine_.new_constraint([this] { update_heads(); });
  }

 private:
  // Walks at most limit + 1 nodes so a broken chain shows up as a mismatch.
  std::vector<std::int64_t> output_list(std::size_t c, std::size_t limit) const {
    std::vector<std::int64_t> out;
    for (ListNode x = engine_.peek(out_head_[c]); x != kNoListNode && out.size() <= limit; x = engine_.peek(onext_[x])) {
      out.push_back(engine_.peek(oval_[x]));
    }
    return out;
  }

  void ensure(ListNode x) {
    if (x >= has_.size()) {
      has_.resize(x + 1, false);
      link_.resize(x + 1);
      oval_.resize(x + 1);
      onext_.resize(x + 1);
    }
    if (has_[x]) return;
    link_[x] = engine_.alloc(std::vector<ListNode>(k_, kNoListNode));
    oval_[x] = engine_.alloc<std::int64_t>(0);
    onext_[x] = engine_.alloc<ListNode>(kNoListNode);
    has_[x] = true;
  }

  void watch(ListNode x) {
    ReactiveList& in = input(0);
    const std::int64_t v = engine_.get(in.val_cell(x));
    const std::size_t cls = classify_(x, v);
    const ListNode nx = engine_.get(in.next_cell(x));
    ensure(x);
    std::vector<ListNode> links(k_, kNoListNode);
    if (nx != kNoListNode) {
      ensure(nx);
      links = engine_.get(link_[nx]);
    }
    if (cls < k_) {
      engine_.set(onext_[x], links[cls]);
      links[cls] = x;
    }
    engine_.set(oval_[x], transform_(v));
    engine_.set(link_[x], std::move(links));
  }

  void drop(ListNode x) {
    if (x >= has_.size() || !has_[x]) return;
    engine_.free(link_[x]);
    engine_.free(oval_[x]);
    engine_.free(onext_[x]);
    has_[x] = false;
  }

  void update_heads() {
    const ListNode h = engine_.get(input(0).head());
    if (h == kNoListNode) {
      for (auto c : out_head_) engine_.set(c, kNoListNode);
      return;
    }
    ensure(h);
    const std::vector<ListNode> links = engine_.get(link_[h]);
    for (std::size_t c = 0; c < k_; ++c) engine_.set(out_head_[c], links[c]);
  }

  std::string name_;
  std::size_t k_;
  Classify classify_;
  Transform transform_;
  std::vector<bool> has_;
  std::vector<Cell<std::vector<ListNode>>> link_;
  std::vector<Cell<std::int64_t>> oval_;
  std::vector<Cell<ListNode>> onext_;
  std::vector<Cell<ListNode>> out_head_;
  std::unique_ptr<Watcher> watcher_;
  ConstraintId head_cons_;
};

// ---------------------------------------------------------------------------

// The output list runs backwards through the input's prev pointers; its head
// is the last input node.
class Reverser final : public ListWorkload {
 public:
  using ListWorkload::ListWorkload;

  ~Reverser() override {
    if (engine_.alive(head_cons_)) engine_.del_constraint(head_cons_);
    watcher_.reset();
    for (ListNode x = 0; x < has_.size(); ++x) {
      if (has_[x]) drop(x);
    }
    if (engine_.valid(out_head_.id())) engine_.free(out_head_);
  }

  std::string_view name() const override { return "reverser"; }

  std::optional<std::string> verify() const override {
    const auto values = mirror(0);
    std::vector<std::int64_t> expected(values.rbegin(), values.rend());
    return compare("reversed list", expected, output_list(values.size()));
  }

  std::vector<std::vector<std::int64_t>> outputs() const override { return {output_list(length(0))}; }

 protected:
  void attach() override {
    out_head_ = engine_.alloc<ListNode>(kNoListNode);
    watcher_ = std::make_unique<Watcher>(
        input(0), [this](ListNode x) { watch(x); }, [this](ListNode x) { drop(x); });
    head_cons_ = engine_.new_constraint([this] {
      if (engine_.get(input(0).head()) == kNoListNode) engine_.set(out_head_, kNoListNode);
    });
  }

 private:
  std::vector<std::int64_t> output_list(std::size_t limit) const {
    std::vector<std::int64_t> out;
    for (ListNode x = engine_.peek(out_head_); x != kNoListNode && out.size() <= limit; x = engine_.peek(onext_[x])) {
      out.push_back(engine_.peek(oval_[x]));
    }
    return out;
  }

  void ensure(ListNode x) {
    if (x >= has_.size()) {
      has_.resize(x + 1, false);
      oval_.resize(x + 1);
      onext_.resize(x + 1);
    }
    if (has_[x]) return;
    oval_[x] = engine_.alloc<std::int64_t>(0);
    onext_[x] = engine_.alloc<ListNode>(kNoListNode);
    has_[x] = true;
  }

  // A node unlinked earlier in the same atomic block may still run; it must
  // not claim the output head.
  bool linked(ListNode x) {
    ReactiveList& in = input(0);
    const ListNode p = engine_.get(in.prev_cell(x));
    if (p == kNoListNode) return engine_.get(in.head()) == x;
    return engine_.get(in.next_cell(p)) == x;
  }

  void watch(ListNode x) {
    ReactiveList& in = input(0);
    ensure(x);
    engine_.set(oval_[x], engine_.get(in.val_cell(x)));
    engine_.set(onext_[x], engine_.get(in.prev_cell(x)));
    if (engine_.get(in.next_cell(x)) == kNoListNode && linked(x)) engine_.set(out_head_, x);
  }

  void drop(ListNode x) {
    if (x >= has_.size() || !has_[x]) return;
    engine_.free(oval_[x]);
    engine_.free(onext_[x]);
    has_[x] = false;
  }

  std::vector<bool> has_;
  std::vector<Cell<std::int64_t>> oval_;
  std::vector<Cell<ListNode>> onext_;
  Cell<ListNode> out_head_;
  std::unique_ptr<Watcher> watcher_;
  ConstraintId head_cons_;
};

// ---------------------------------------------------------------------------

using Run = std::vector<std::int64_t>;

// Complete binary tree of sorted runs. Leaves hold at most one value; each
// internal cell is kept equal to the merge of its children by one
// constraint. Capacity doubles by hanging a fresh empty subtree next to the
// old root.
class MergeTree {
 public:
  MergeTree(Engine& engine, std::size_t capacity) : engine_(engine) {
    std::size_t c = 1;
    while (c < capacity) c *= 2;
    Engine::AtomicBlock batch(engine_);
    levels_.emplace_back();
    for (std::size_t i = 0; i < c; ++i) levels_[0].push_back(engine_.alloc(Run{}));
    for (std::size_t width = c / 2, level = 1; width >= 1; width /= 2, ++level) {
      levels_.emplace_back();
      for (std::size_t i = 0; i < width; ++i) add_node(level);
    }
    for (std::size_t i = c; i-- > 0;) free_.push_back(i);
  }

  ~MergeTree() {
    for (ConstraintId id : cons_) engine_.del_constraint(id);
    for (auto& level : levels_) {
      for (auto cell : level) engine_.free(cell);
    }
  }

  MergeTree(const MergeTree&) = delete;
  MergeTree& operator=(const MergeTree&) = delete;

  std::size_t acquire() {
    if (free_.empty()) grow();
    const std::size_t slot = free_.back();
    free_.pop_back();
    return slot;
  }

  void release(std::size_t slot) { free_.push_back(slot); }

  Cell<Run> leaf(std::size_t slot) const { return levels_[0][slot]; }
  Cell<Run> root() const { return levels_.back()[0]; }

 private:
  void add_node(std::size_t level) {
    const std::size_t i = levels_[level].size();
    const Cell<Run> left = levels_[level - 1][2 * i];
    const Cell<Run> right = levels_[level - 1][2 * i + 1];
    const Cell<Run> out = engine_.alloc(Run{});
    levels_[level].push_back(out);
    Engine& e = engine_;
    cons_.push_back(engine_.new_constraint([&e, left, right, out] {
      const Run& a = e.get(left);
      const Run& b = e.get(right);
      Run merged;
      merged.reserve(a.size() + b.size());
      std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
      e.set(out, std::move(merged));
    }));
  }

  void grow() {
    Engine::AtomicBlock batch(engine_);
    const std::size_t old = levels_[0].size();
    for (std::size_t i = 0; i < old; ++i) levels_[0].push_back(engine_.alloc(Run{}));
    const std::size_t top = levels_.size();
    for (std::size_t level = 1; level < top; ++level) {
      const std::size_t target = levels_[level].size() * 2;
      while (levels_[level].size() < target) add_node(level);
    }
    levels_.emplace_back();
    add_node(top);
    for (std::size_t i = 2 * old; i-- > old;) free_.push_back(i);
  }

  Engine& engine_;
  std::vector<std::vector<Cell<Run>>> levels_;
  std::vector<ConstraintId> cons_;
  std::vector<std::size_t> free_;
};

// msorter sorts one list; merger merges two sorted lists. Both feed every
// input node into a leaf of the merge tree.
class Sorter final : public ListWorkload {
 public:
  Sorter(Engine& engine, const WorkloadOptions& options, bool merger)
      : ListWorkload(engine, options), merger_(merger) {}

  ~Sorter() override {
    watchers_.clear();
    tree_.reset();
  }

  std::string_view name() const override { return merger_ ? "merger" : "msorter"; }

  std::optional<std::string> verify() const override {
    Run expected;
    if (merger_) {
      std::merge(mirror(0).begin(), mirror(0).end(), mirror(1).begin(), mirror(1).end(),
                 std::back_inserter(expected));
    } else {
      expected.assign(mirror(0).begin(), mirror(0).end());
      std::sort(expected.begin(), expected.end());
    }
    return compare("sorted output", expected, engine_.peek(tree_->root()));
  }

  std::vector<std::vector<std::int64_t>> outputs() const override { return {engine_.peek(tree_->root())}; }

 protected:
  std::size_t input_count() const override { return merger_ ? 2 : 1; }
  bool sorted_inputs() const override { return merger_; }

  void attach() override {
    std::size_t total = 0;
    for (std::size_t l = 0; l < list_count(); ++l) total += length(l);
    tree_ = std::make_unique<MergeTree>(engine_, total);
    slot_.resize(list_count());
    for (std::size_t l = 0; l < list_count(); ++l) {
      watchers_.push_back(std::make_unique<Watcher>(
          input(l), [this, l](ListNode x) { watch(l, x); }, [this, l](ListNode x) { drop(l, x); }));
    }
  }

 private:
  static constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);

  void watch(std::size_t l, ListNode x) {
    auto& slots = slot_[l];
    if (x >= slots.size()) slots.resize(x + 1, kNoSlot);
    if (slots[x] == kNoSlot) slots[x] = tree_->acquire();
    engine_.set(tree_->leaf(slots[x]), Run{engine_.get(input(l).val_cell(x))});
  }

  void drop(std::size_t l, ListNode x) {
    std::size_t& slot = slot_[l][x];
    if (slot == kNoSlot) return;
    engine_.set(tree_->leaf(slot), Run{});
    tree_->release(slot);
    slot = kNoSlot;
  }

  bool merger_;
  std::unique_ptr<MergeTree> tree_;
  std::vector<std::vector<std::size_t>> slot_;
  std::vector<std::unique_ptr<Watcher>> watchers_;
};

}  // namespace

std::unique_ptr<Workload> make_exptrees_workload(Engine& engine, const WorkloadOptions& options);
std::unique_ptr<Workload> make_vecmat_workload(Engine& engine, const WorkloadOptions& options);
std::unique_ptr<Workload> make_random_sp_workload(Engine& engine, const WorkloadOptions& options);

const std::vector<std::string>& workload_names() {
  static const std::vector<std::string> names{"adder",    "filter",   "halver",   "mapper", "merger", "msorter",
                                              "reverser", "splitter", "exptrees", "sp",     "vecmat"};
  return names;
}

bool is_list_workload(std::string_view name) {
  return name == "adder" || name == "filter" || name == "halver" || name == "mapper" || name == "merger" ||
         name == "msorter" || name == "reverser" || name == "splitter";
}

std::unique_ptr<Workload> make_workload(std::string_view name, Engine& engine, const WorkloadOptions& options) {
  if (name == "adder") return std::make_unique<Adder>(engine, options);
  if (name == "mapper") {
    return std::make_unique<Partition>(
        engine, options, "mapper", 1, [](ListNode, std::int64_t) { return std::size_t{0}; },
        [](std::int64_t v) { return wrap_add(wrap_mul(v, 3), 1); });
  }
  if (name == "filter") {
    return std::make_unique<Partition>(
        engine, options, "filter", 1, [](ListNode, std::int64_t v) { return std::size_t(v & 1); },
        [](std::int64_t v) { return v; });
  }
  if (name == "halver") {
    return std::make_unique<Partition>(
        engine, options, "halver", 2, [](ListNode x, std::int64_t) { return std::size_t(node_hash(x) & 1); },
        [](std::int64_t v) { return v; });
  }
  if (name == "splitter") {
    return std::make_unique<Partition>(
        engine, options, "splitter", 2, [](ListNode, std::int64_t v) { return std::size_t(v < 0 ? 0 : 1); },
        [](std::int64_t v) { return v; });
  }
  if (name == "reverser") return std::make_unique<Reverser>(engine, options);
  if (name == "msorter") return std::make_unique<Sorter>(engine, options, false);
  if (name == "merger") return std::make_unique<Sorter>(engine, options, true);
  if (name == "exptrees") return make_exptrees_workload(engine, options);
  if (name == "vecmat") return make_vecmat_workload(engine, options);
  if (name == "sp") return make_random_sp_workload(engine, options);
  throw Error(Errc::InvalidArgument, "unknown benchmark '" + std::string(name) + "'");
}

}  // namespace dflow::bench
