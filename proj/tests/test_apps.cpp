#include <doctest.h>

#include <algorithm>
#include <vector>

#include "dflow/apps/exptree.hpp"
#include "dflow/apps/observer.hpp"
#include "dflow/apps/reactive_list.hpp"
#include "dflow/apps/shortest_paths.hpp"
#include "dflow/apps/vecmat.hpp"
#include "dflow/apps/watcher.hpp"
#include "dflow/bench/oracles.hpp"
#include "dflow/dflow.hpp"
#include "support.hpp"

using namespace dflow;
using namespace dflow::apps;
using dflow::test::ExecLog;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no dflow::Error thrown");
  return Errc::VerificationFailed;
}

Expr sample_expr() { return Expr::apply(Op::Sum, Expr::leaf(10), Expr::apply(Op::Prod, Expr::leaf(2), Expr::leaf(6))); }

bool prev_consistent(const ReactiveList& list) {
  for (ListNode x : list.nodes(1000)) {
    const ListNode n = list.next(x);
    if (n != kNoListNode && list.prev(n) != x) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("exptree") {
  TEST_CASE("the sample tree evaluates to 22") {
    Engine e;
    ExpTree tree(e);
    const auto root = tree.build(sample_expr());
    CHECK(tree.value(root) == 22);
    CHECK(tree.size() == 5);
    CHECK(tree.height(root) == 2);
  }

  TEST_CASE("a leaf update re-runs the product and the root only") {
    Engine e;
    ExpTree tree(e);
    const auto root = tree.build(sample_expr());
    const auto prod = tree.child(root, Side::Right);
    const auto six = tree.child(prod, Side::Right);
    ExecLog log(e);
    tree.set_leaf(six, 3);
    CHECK(tree.value(root) == 16);
    REQUIRE(log.ids.size() == 2);
    CHECK(log.ids[0] == tree.constraint(prod));
    CHECK(log.ids[1] == tree.constraint(root));
  }

  TEST_CASE("a batched op flip and leaf change run in one session") {
    Engine e;
    ExpTree tree(e);
    const auto root = tree.build(sample_expr());
    const auto ten = tree.child(root, Side::Left);
    const auto prod = tree.child(root, Side::Right);
    const auto sessions = e.stats().sessions;
    {
      Engine::AtomicBlock batch(e);
      tree.set_op(prod, Op::Sum);
      tree.set_leaf(ten, 1);
    }
    CHECK(e.stats().sessions == sessions + 1);
    const auto expected = bench::evaluate(Expr::apply(Op::Sum, Expr::leaf(1), Expr::apply(Op::Sum, Expr::leaf(2), Expr::leaf(6))));
    CHECK(tree.value(root) == expected);
    CHECK(tree.value(root) == 9);
  }

  TEST_CASE("splicing replaces a subtree and deletes the old nodes") {
    Engine e;
    ExpTree tree(e);
    const auto root = tree.build(sample_expr());
    const auto prod = tree.child(root, Side::Right);
    const auto constraints = e.live_constraints();
    const auto replacement = tree.build(Expr::apply(Op::Prod, Expr::leaf(3), Expr::leaf(7)));
    tree.splice(root, Side::Right, replacement);
    CHECK(tree.value(root) == 31);
    CHECK(tree.size() == 5);
    CHECK(e.live_constraints() == constraints);
    CHECK_THROWS_AS(tree.value(prod), Error);
    tree.remove_child(root, Side::Right);
    CHECK(tree.size() == 2);
    CHECK(tree.value(root) == 31);
  }

  TEST_CASE("attaching an ancestor below its descendant is a cycle") {
    Engine e;
    ExpTree tree(e);
    const auto root = tree.build(sample_expr());
    const auto prod = tree.child(root, Side::Right);
    CHECK(code_of([&] { tree.set_child(prod, Side::Left, root); }) == Errc::CycleDetected);
    CHECK(code_of([&] { tree.splice(prod, Side::Left, root); }) == Errc::CycleDetected);
    CHECK(tree.value(root) == 22);
    CHECK(code_of([&] { tree.set_child(root, Side::Left, prod); }) == Errc::InvalidArgument);
  }

  TEST_CASE("unknown nodes are rejected") {
    Engine e;
    ExpTree tree(e);
    CHECK(code_of([&] { tree.set_leaf(42, 1); }) == Errc::UnknownNode);
  }
}

TEST_SUITE("observer") {
  TEST_CASE("the observer follows the subject but not the other way") {
    Engine e;
    Counter a(e);
    Counter b(e);
    connect(e, a, b);
    a.set_value(12);
    CHECK(a.value() == 12);
    CHECK(b.value() == 12);
    b.set_value(48);
    CHECK(a.value() == 12);
    CHECK(b.value() == 48);
  }

  TEST_CASE("a chain propagates in one session") {
    Engine e;
    Counter a(e);
    Counter b(e);
    Counter c(e);
    connect(e, a, b);
    connect(e, b, c);
    const auto sessions = e.stats().sessions;
    a.set_value(7);
    CHECK(c.value() == 7);
    CHECK(e.stats().sessions == sessions + 1);
    CHECK(e.stats().executions_last_session == 2);
  }
}

TEST_SUITE("watcher") {
  TEST_CASE("the repairer fixes a broken prev pointer") {
    Engine e;
    ReactiveList list(e);
    const auto nodes = list.append({1, 2, 3});
    e.set(list.prev_cell(nodes[1]), nodes[2]);
    CHECK_FALSE(prev_consistent(list));
    auto repairer = attach_repairer(list);
    CHECK(prev_consistent(list));
    CHECK(list.prev(nodes[1]) == nodes[0]);
    e.set(list.prev_cell(nodes[2]), kNoListNode);
    CHECK(list.prev(nodes[2]) == nodes[1]);
    CHECK(repairer->shadow_count() == 4);
  }

  TEST_CASE("a removed node's shadow stops repairing") {
    Engine e;
    ReactiveList list(e);
    const auto nodes = list.append({1, 2, 3});
    auto repairer = attach_repairer(list);
    list.remove_after(nodes[0]);
    CHECK(list.prev(nodes[2]) == nodes[0]);
    // The detached node still points at its old successor.
    e.set(list.prev_cell(nodes[2]), nodes[1]);
    CHECK(list.prev(nodes[2]) == nodes[0]);
    CHECK(repairer->shadow_count() == 3);
  }

  TEST_CASE("unlinking a node reclaims its shadow in the same cascade") {
    Engine e;
    ReactiveList list(e);
    const auto nodes = list.append({1, 2, 3});
    std::vector<ListNode> released;
    Watcher w(list, [](ListNode) {}, [&](ListNode n) { released.push_back(n); });
    CHECK(w.shadow_count() == 4);
    CHECK(w.mirrored() == nodes);
    const auto victim = list.remove_after(nodes[0]);
    CHECK(victim == nodes[1]);
    CHECK(w.shadow_count() == 3);
    CHECK(released == std::vector<ListNode>{nodes[1]});
    CHECK(w.mirrored() == std::vector<ListNode>{nodes[0], nodes[2]});
    list.release(victim);
    CHECK(e.queue_size() == 0);
  }

  TEST_CASE("two watchers on one list both fire and do not interfere") {
    Engine e;
    ReactiveList list(e);
    const auto nodes = list.append({1, 2, 3});
    std::vector<ListNode> seen_a;
    std::vector<ListNode> seen_b;
    Watcher a(list, [&](ListNode n) { seen_a.push_back(n); });
    Watcher b(list, [&](ListNode n) { seen_b.push_back(n); });
    seen_a.clear();
    seen_b.clear();
    const auto fresh = list.insert_after(nodes[1], 9);
    CHECK(std::count(seen_a.begin(), seen_a.end(), fresh) == 1);
    CHECK(std::count(seen_b.begin(), seen_b.end(), fresh) == 1);
    CHECK(a.shadow_count() == 5);
    CHECK(b.shadow_count() == 5);
    a.detach();
    CHECK_FALSE(a.attached());
    seen_b.clear();
    list.insert_after(kNoListNode, 0);
    CHECK(b.shadow_count() == 6);
    CHECK(b.mirrored() == list.nodes());
    CHECK_FALSE(seen_b.empty());
  }

  TEST_CASE("the watcher follows the head through front removals") {
    Engine e;
    ReactiveList list(e);
    list.append({1, 2, 3, 4});
    Watcher w(list, [](ListNode) {});
    while (list.first() != kNoListNode) list.release(list.remove_after(kNoListNode));
    CHECK(w.shadow_count() == 1);
    CHECK(w.mirrored().empty());
  }
}

TEST_SUITE("shortest paths") {
  TEST_CASE("single edge") {
    Engine e;
    ShortestPaths sp(e, 2, 0);
    sp.insert(0, 1, 5);
    CHECK(sp.distance(1) == 5);
    CHECK(sp.distance(0) == 0);
  }

  TEST_CASE("three edges and a decrease") {
    for (auto variant : {ShortestPaths::Variant::PerNode, ShortestPaths::Variant::PerEdge}) {
      Engine e;
      ShortestPaths sp(e, 3, 0, variant);
      const Vertex s = 0;
      const Vertex a = 1;
      const Vertex b = 2;
      sp.insert(s, a, 5);
      sp.insert(s, b, 10);
      sp.insert(a, b, 2);
      CHECK(sp.distance(a) == 5);
      CHECK(sp.distance(b) == 7);
      CHECK(sp.distances() == bench::dijkstra(3, sp.edges(), s));
      sp.decrease(s, a, 4);
      CHECK(sp.distance(a) == 1);
      CHECK(sp.distance(b) == 3);
      CHECK(sp.weight(s, a) == 1);
      CHECK(sp.distances() == bench::dijkstra(3, sp.edges(), s));
    }
  }

  TEST_CASE("a decrease re-executes only the improved vertices") {
    Engine e;
    ShortestPaths sp(e, 3, 0);
    sp.insert(0, 1, 5);
    sp.insert(0, 2, 10);
    sp.insert(1, 2, 2);
    ExecLog log(e);
    sp.decrease(0, 1, 4);
    std::vector<Vertex> ran;
    for (auto id : log.ids) ran.push_back(sp.vertex_of(id));
    CHECK(ran == std::vector<Vertex>{1, 2});
  }

  TEST_CASE("bad input is rejected") {
    Engine e;
    ShortestPaths sp(e, 3, 0);
    sp.insert(0, 1, 5);
    CHECK(code_of([&] { sp.insert(0, 1, 3); }) == Errc::DuplicateEdge);
    CHECK(code_of([&] { sp.insert(0, 7, 3); }) == Errc::UnknownNode);
    CHECK(code_of([&] { sp.decrease(1, 2, 1); }) == Errc::UnknownNode);
    CHECK(code_of([&] { sp.decrease(0, 1, 0); }) == Errc::InvalidArgument);
    CHECK(code_of([&] { ShortestPaths bad(e, 2, 5); }) == Errc::UnknownNode);
  }

  TEST_CASE("unreachable vertices stay unreachable") {
    Engine e;
    ShortestPaths sp(e, 4, 0);
    sp.insert(1, 2, 1);
    CHECK(sp.distance(1) == kUnreachable);
    CHECK(sp.distance(2) == kUnreachable);
    sp.insert(0, 1, 3);
    CHECK(sp.distance(2) == 4);
    CHECK(sp.distance(3) == kUnreachable);
  }

  TEST_CASE("the per-edge variant has no vertex constraints") {
    Engine e;
    ShortestPaths sp(e, 2, 0, ShortestPaths::Variant::PerEdge);
    CHECK(code_of([&] { (void)sp.vertex_constraint(0); }) == Errc::InvalidArgument);
  }
}

TEST_SUITE("vecmat") {
  TEST_CASE("a 2x2 product") {
    Engine e;
    const std::vector<std::int64_t> v{1, 2};
    VecMatProduct p(e, v, {{3, 4}, {5, 6}}, 1);
    CHECK(p.outputs() == std::vector<std::int64_t>{13, 16});
  }

  TEST_CASE("a single cell update runs one constraint") {
    Engine e;
    const std::vector<std::int64_t> v{1, 2, 3};
    VecMatProduct p(e, v, {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}, 1);
    const auto before = e.stats();
    p.set_cell(1, 2, 10);
    CHECK(dflow::test::executed_since(e, before) == 1);
    CHECK(p.outputs() == bench::vecmat_product(v, {{1, 2, 3}, {4, 5, 10}, {7, 8, 9}}));
  }

  TEST_CASE("a column update costs one constraint per block") {
    const std::vector<std::int64_t> v{1, 2, 3, 4};
    const VecMatProduct::Matrix m{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    const std::vector<std::int64_t> column{5, 6, 7, 8};
    for (std::size_t block : {std::size_t{4}, std::size_t{1}, std::size_t{2}}) {
      Engine e;
      VecMatProduct p(e, v, m, block);
      const auto before = e.stats();
      p.set_column(3, column);
      CHECK(dflow::test::executed_since(e, before) == 4 / block);
      CHECK(p.output(3) == 1 * 5 + 2 * 6 + 3 * 7 + 4 * 8);
    }
  }

  TEST_CASE("vector updates reach every column") {
    Engine e;
    const std::vector<std::int64_t> v{1, 2};
    VecMatProduct p(e, v, {{3, 4}, {5, 6}}, 2);
    p.set_vector(0, -1);
    CHECK(p.outputs() == bench::vecmat_product(std::vector<std::int64_t>{-1, 2}, {{3, 4}, {5, 6}}));
  }

  TEST_CASE("dimension errors") {
    Engine e;
    const std::vector<std::int64_t> v{1, 2};
    CHECK(code_of([&] { VecMatProduct p(e, v, {{1, 2}}, 1); }) == Errc::DimensionMismatch);
    CHECK(code_of([&] { VecMatProduct p(e, v, {{1, 2}, {3}}, 1); }) == Errc::DimensionMismatch);
    CHECK(code_of([&] { VecMatProduct p(e, v, {{1, 2}, {3, 4}}, 0); }) == Errc::DimensionMismatch);
    CHECK(code_of([&] { VecMatProduct p(e, v, {{1, 2}, {3, 4}}, 3); }) == Errc::DimensionMismatch);
    VecMatProduct p(e, v, {{1, 2}, {3, 4}}, 1);
    CHECK(code_of([&] { p.set_cell(2, 0, 1); }) == Errc::DimensionMismatch);
    const std::vector<std::int64_t> short_column{1};
    CHECK(code_of([&] { p.set_column(0, short_column); }) == Errc::DimensionMismatch);
  }
}
