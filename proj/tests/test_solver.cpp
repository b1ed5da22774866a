#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "dflow/apps/exptree.hpp"
#include "dflow/dflow.hpp"
#include "support.hpp"

using namespace dflow;
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

}  // namespace

TEST_SUITE("constraints") {
  TEST_CASE("copy constraint runs at creation") {
    Engine e;
    const auto a = e.alloc(12);
    const auto b = e.alloc(0);
    e.new_constraint([&] { e.set(b, e.get(a)); });
    CHECK(e.peek(b) == 12);
    e.set(a, 30);
    CHECK(e.peek(b) == 30);
  }

  TEST_CASE("a constraint that reads nothing never runs again") {
    Engine e;
    const auto x = e.alloc(0);
    int runs = 0;
    e.new_constraint([&] { ++runs; });
    CHECK(runs == 1);
    for (int i = 1; i < 5; ++i) e.set(x, i);
    CHECK(runs == 1);
  }

  TEST_CASE("a constraint created inside a body runs later in the same session") {
    Engine e;
    const auto trigger = e.alloc(0);
    std::vector<std::string> order;
    bool spawned = false;
    e.new_constraint([&] {
      if (e.get(trigger) == 1 && !spawned) {
        spawned = true;
        e.new_constraint([&] { order.push_back("child"); });
        order.push_back("parent done");
      }
    });
    const auto sessions = e.stats().sessions;
    e.set(trigger, 1);
    CHECK(order == std::vector<std::string>{"parent done", "child"});
    CHECK(e.stats().sessions == sessions + 1);
  }

  TEST_CASE("the user parameter reaches the body") {
    Engine e;
    UserParam seen = 0;
    const auto id = e.new_constraint([&](UserParam p) { seen = p; }, 77);
    CHECK(seen == 77);
    CHECK(e.param(id) == 77);
  }

  TEST_CASE("a deleted constraint never runs again") {
    Engine e;
    const auto x = e.alloc(0);
    int runs = 0;
    const auto c = e.new_constraint([&] {
      ++runs;
      (void)e.get(x);
    });
    e.del_constraint(c);
    CHECK_FALSE(e.alive(c));
    e.set(x, 1);
    CHECK(runs == 1);
    CHECK(code_of([&] { e.del_constraint(c); }) == Errc::InvalidConstraint);
    CHECK(code_of([&] { e.del_constraint(ConstraintId{1234, 0}); }) == Errc::InvalidConstraint);
  }

  TEST_CASE("deleting a queued constraint keeps it from running") {
    Engine e;
    const auto trigger = e.alloc(0);
    ConstraintId victim;
    int victim_runs = 0;
    // Created first, so under the default policy it pops before the victim.
    e.new_constraint([&] {
      if (e.get(trigger) == 1 && e.alive(victim)) e.del_constraint(victim);
    });
    victim = e.new_constraint([&] {
      ++victim_runs;
      (void)e.get(trigger);
    });
    ExecLog log(e);
    e.set(trigger, 1);
    CHECK(victim_runs == 1);
    CHECK(log.ids.size() == 1);
    CHECK(e.queue_size() == 0);
  }

  TEST_CASE("a constraint may delete itself while running") {
    Engine e;
    const auto x = e.alloc(0);
    const auto y = e.alloc(0);
    int runs = 0;
    const auto c = e.new_constraint([&] {
      ++runs;
      e.set(y, e.get(x));
      if (e.get(x) == 2) e.del_constraint(*e.current());
    });
    e.set(x, 2);
    CHECK_FALSE(e.alive(c));
    CHECK(e.peek(y) == 2);
    e.set(x, 3);
    CHECK(runs == 2);
    CHECK(e.peek(y) == 2);
    CHECK(e.live_constraints() == 0);
  }
}

TEST_SUITE("atomic blocks") {
  TEST_CASE("a net-unchanged cell triggers nothing") {
    Engine e;
    const auto x = e.alloc(5);
    int runs = 0;
    e.new_constraint([&] {
      ++runs;
      (void)e.get(x);
    });
    {
      Engine::AtomicBlock block(e);
      e.set(x, 7);
      e.set(x, 5);
    }
    CHECK(runs == 1);
  }

  TEST_CASE("k written cells run each dependent once") {
    Engine e;
    constexpr int k = 6;
    std::vector<Cell<int>> cells;
    std::vector<int> runs(k, 0);
    for (int i = 0; i < k; ++i) cells.push_back(e.alloc(0));
    for (int i = 0; i < k; ++i) {
      e.new_constraint([&, i] {
        ++runs[static_cast<std::size_t>(i)];
        (void)e.get(cells[static_cast<std::size_t>(i)]);
      });
    }
    std::fill(runs.begin(), runs.end(), 0);
    ExecLog log(e);
    e.begin_atomic();
    for (int i = 0; i < k; ++i) e.set(cells[static_cast<std::size_t>(i)], i + 1);
    CHECK(log.ids.empty());
    e.end_atomic();
    CHECK(std::all_of(runs.begin(), runs.end(), [](int r) { return r == 1; }));
    CHECK(log.ids.size() == k);
  }

  TEST_CASE("nested blocks resume the solver at the outer end only") {
    Engine e;
    const auto x = e.alloc(0);
    int runs = 0;
    e.new_constraint([&] {
      ++runs;
      (void)e.get(x);
    });
    e.begin_atomic();
    e.begin_atomic();
    e.set(x, 1);
    e.end_atomic();
    CHECK(runs == 1);
    CHECK(e.atomic_depth() == 1);
    e.end_atomic();
    CHECK(runs == 2);
    CHECK(e.atomic_depth() == 0);
  }

  TEST_CASE("constraints created in a block run at its end") {
    Engine e;
    int runs = 0;
    {
      Engine::AtomicBlock block(e);
      e.new_constraint([&] { ++runs; });
      CHECK(runs == 0);
    }
    CHECK(runs == 1);
  }

  TEST_CASE("unbalanced end is rejected") {
    Engine e;
    CHECK(code_of([&] { e.end_atomic(); }) == Errc::UnbalancedAtomic);
  }

  TEST_CASE("atomic calls inside a body only wrap the code") {
    Engine e;
    const auto x = e.alloc(1);
    const auto y = e.alloc(0);
    e.new_constraint([&] {
      e.begin_atomic();
      e.set(y, e.get(x) * 10);
      e.end_atomic();
    });
    CHECK(e.peek(y) == 10);
    e.set(x, 2);
    CHECK(e.peek(y) == 20);
    CHECK(e.atomic_depth() == 0);
  }

  TEST_CASE("an empty block runs no session") {
    Engine e;
    e.begin_atomic();
    e.end_atomic();
    CHECK(e.stats().sessions == 0);
  }
}

TEST_SUITE("final handlers") {
  TEST_CASE("a handler runs once per session however often its constraint ran") {
    Engine e;
    const auto counter = e.alloc(1);
    const auto log_cell = e.alloc(0);
    int handler_runs = 0;
    int body_runs = 0;
    e.new_constraint([&] {
      ++body_runs;
      const int v = e.get(counter);
      if (v < 3) e.set(counter, v + 1);
      e.arm_final(*e.current(), [&](UserParam) {
        ++handler_runs;
        e.set(log_cell, e.peek(log_cell) + 1);
      });
    });
    CHECK(body_runs == 3);
    CHECK(handler_runs == 1);
    CHECK(e.peek(log_cell) == 1);
    CHECK(e.peek(counter) == 3);
  }

  TEST_CASE("an empty handler cancels the request") {
    Engine e;
    int handler_runs = 0;
    e.new_constraint([&] {
      const auto self = *e.current();
      e.arm_final(self, [&](UserParam) { ++handler_runs; });
      e.arm_final(self, {});
    });
    CHECK(handler_runs == 0);
  }

  TEST_CASE("handler writes start a follow-up round after all handlers") {
    Engine e;
    const auto out = e.alloc(0);
    const auto trigger = e.alloc(0);
    std::vector<std::string> order;
    e.new_constraint([&] {
      if (e.get(out) != 0) order.push_back("dependent");
    });
    e.new_constraint([&] {
      if (e.get(trigger) == 0) return;
      e.arm_final(*e.current(), [&](UserParam) {
        e.set(out, 2);
        order.push_back("first handler");
      });
    });
    e.new_constraint([&] {
      if (e.get(trigger) == 0) return;
      e.arm_final(*e.current(), [&](UserParam) { order.push_back("second handler"); });
    });
    e.set(trigger, 1);
    CHECK(order == std::vector<std::string>{"first handler", "second handler", "dependent"});
    CHECK(e.queue_size() == 0);
  }

  TEST_CASE("a handler deletes the constraint that armed it") {
    Engine e;
    ConstraintId self;
    self = e.new_constraint([&] {
      e.arm_final(*e.current(), [&](UserParam) {
        if (e.alive(self)) e.del_constraint(self);
      });
    });
    // `self` was still null during the first session; arm again now.
    CHECK(e.schedule(self));
    CHECK_FALSE(e.alive(self));
    CHECK(e.live_constraints() == 0);
    CHECK(e.queue_size() == 0);
  }

  TEST_CASE("handlers of constraints deleted mid-session are skipped") {
    Engine e;
    const auto trigger = e.alloc(0);
    ConstraintId armer;
    int handler_runs = 0;
    e.begin_atomic();
    armer = e.new_constraint([&] {
      (void)e.get(trigger);
      e.arm_final(*e.current(), [&](UserParam) { ++handler_runs; });
    });
    e.new_constraint([&] {
      if (e.get(trigger) == 1) e.del_constraint(armer);
    });
    e.end_atomic();
    CHECK(handler_runs == 1);
    e.set(trigger, 1);
    CHECK(handler_runs == 1);
    CHECK_FALSE(e.alive(armer));
  }

  TEST_CASE("constraints created by a handler are deferred") {
    Engine e;
    std::vector<std::string> order;
    e.new_constraint([&] {
      e.arm_final(*e.current(), [&](UserParam) {
        e.new_constraint([&] { order.push_back("created"); });
        order.push_back("handler");
      });
    });
    CHECK(order == std::vector<std::string>{"handler", "created"});
  }

  TEST_CASE("handlers read without a running constraint") {
    Engine e;
    std::optional<ConstraintId> during;
    Mode mode = Mode::Normal;
    e.new_constraint([&] {
      e.arm_final(*e.current(), [&](UserParam) {
        during = e.current();
        mode = e.mode();
      });
    });
    CHECK_FALSE(during.has_value());
    CHECK(mode == Mode::FinalHandlers);
  }
}

TEST_SUITE("solver loop") {
  TEST_CASE("a converging max cycle stabilizes") {
    Engine e;
    const auto x = e.alloc(3);
    const auto y = e.alloc(0);
    e.begin_atomic();
    e.new_constraint([&] { e.set(y, std::max(e.get(y), e.get(x))); });
    e.new_constraint([&] { e.set(x, std::max(e.get(x), e.get(y))); });
    e.end_atomic();
    CHECK(e.peek(x) == 3);
    CHECK(e.peek(y) == 3);
    CHECK(e.stats().executions_last_session <= 4);
    e.set(y, 9);
    CHECK(e.peek(x) == 9);
    CHECK(e.peek(y) == 9);
  }

  TEST_CASE("an oscillating pair exhausts the budget and the engine stays usable") {
    Engine e;
    e.set_exec_budget(1000);
    const auto x = e.alloc(0);
    const auto y = e.alloc(0);
    e.begin_atomic();
    const auto c1 = e.new_constraint([&] { e.set(y, e.get(x) + 1); });
    const auto c2 = e.new_constraint([&] { e.set(x, e.get(y) + 1); });
    CHECK(code_of([&] { e.end_atomic(); }) == Errc::SolverBudgetExceeded);
    CHECK(e.stats().last_session_failed);
    CHECK(e.queue_size() == 0);
    CHECK(e.mode() == Mode::Normal);
    CHECK(e.atomic_depth() == 0);
    (void)e.get(x);
    e.del_constraint(c1);
    e.del_constraint(c2);
    e.set(x, 5);
    CHECK(e.peek(x) == 5);
    const auto z = e.alloc(1);
    const auto w = e.alloc(0);
    e.new_constraint([&] { e.set(w, e.get(z) * 2); });
    e.set(z, 4);
    CHECK(e.peek(w) == 8);
    CHECK_FALSE(e.stats().last_session_failed);
  }

  TEST_CASE("a self-dependent constraint reschedules itself") {
    Engine e;
    const auto x = e.alloc(0);
    int runs = 0;
    e.new_constraint([&] {
      ++runs;
      const int v = e.get(x);
      if (v < 5) e.set(x, v + 1);
    });
    CHECK(e.peek(x) == 5);
    CHECK(runs == 6);
  }

  TEST_CASE("an exception in a body aborts the session and reaches the caller") {
    Engine e;
    const auto x = e.alloc(0);
    const auto y = e.alloc(0);
    const auto other = e.alloc(0);
    e.new_constraint([&] {
      e.set(y, e.get(x));
      if (e.get(x) == 13) throw std::runtime_error("unlucky");
    });
    e.new_constraint([&] { (void)e.get(x); });
    CHECK_THROWS_AS(e.set(x, 13), std::runtime_error);
    CHECK(e.stats().last_session_failed);
    CHECK(e.queue_size() == 0);
    CHECK(e.peek(y) == 13);
    e.set(x, 1);
    CHECK(e.peek(y) == 1);
    e.set(other, 1);
    CHECK_FALSE(e.stats().last_session_failed);
  }

  TEST_CASE("bodies never nest") {
    Engine e;
    const auto a = e.alloc(0);
    const auto b = e.alloc(0);
    int depth = 0;
    int max_depth = 0;
    auto body = [&](Cell<int> in, Cell<int> out) {
      ++depth;
      max_depth = std::max(max_depth, depth);
      e.set(out, e.get(in) + 1);
      --depth;
    };
    const auto c = e.alloc(0);
    e.new_constraint([&] { body(a, b); });
    e.new_constraint([&] { body(b, c); });
    e.set(a, 10);
    CHECK(e.peek(c) == 12);
    CHECK(max_depth == 1);
  }

  TEST_CASE("sessions execute something iff a watched value changed") {
    Engine e;
    const auto watched = e.alloc(0);
    const auto ignored = e.alloc(0);
    e.new_constraint([&] { (void)e.get(watched); });
    const auto before = e.stats();
    e.set(ignored, 1);
    e.set(watched, 0);
    CHECK(e.stats().constraints_executed == before.constraints_executed);
    e.set(watched, 1);
    CHECK(e.stats().constraints_executed == before.constraints_executed + 1);
  }
}

TEST_SUITE("stale dependencies") {
  TEST_CASE("old dependencies go stale and are dropped on the next write") {
    Engine e;
    const auto flag = e.alloc(true);
    const auto a = e.alloc(1);
    const auto b = e.alloc(2);
    int runs = 0;
    e.new_constraint([&] {
      ++runs;
      (void)(e.get(flag) ? e.get(a) : e.get(b));
    });
    e.set(flag, false);
    const auto live = e.stats().dependencies_live;
    const auto collected = e.stats().stale_collected;
    runs = 0;
    e.set(a, 50);
    CHECK(runs == 0);
    CHECK(e.stats().stale_collected == collected + 1);
    CHECK(e.stats().dependencies_live == live - 1);
  }

  TEST_CASE("nothing to collect returns zero") {
    Engine e;
    CHECK(e.collect_stale(100) == 0);
    const auto x = e.alloc(0);
    e.new_constraint([&] { (void)e.get(x); });
    CHECK(e.collect_stale(100) == 0);
  }

  TEST_CASE("alternating reads stay bounded after collection") {
    Engine e;
    const auto a = e.alloc(0);
    const auto b = e.alloc(0);
    int k = 0;
    const auto c = e.new_constraint([&] { (void)e.get(k++ % 2 == 0 ? a : b); });
    for (int i = 0; i < 100; ++i) e.schedule(c);
    CHECK(e.stats().dependencies_live > 2);
    CHECK(e.collect_stale(1000) > 0);
    CHECK(e.stats().dependencies_live <= 2);
    CHECK(e.stats().dependencies_current == 1);
  }
}

TEST_SUITE("stats") {
  TEST_CASE("a fresh engine has zero counters") {
    Engine e;
    const auto s = e.stats();
    CHECK(s.constraints_executed == 0);
    CHECK(s.distinct_constraints_last_session == 0);
    CHECK(s.dependencies_live == 0);
    CHECK(s.stale_collected == 0);
    CHECK(s.sessions == 0);
  }

  TEST_CASE("one triggered constraint counts once") {
    Engine e;
    const auto x = e.alloc(0);
    e.new_constraint([&] { (void)e.get(x); });
    const auto before = e.stats();
    e.set(x, 1);
    CHECK(dflow::test::executed_since(e, before) == 1);
    CHECK(e.stats().executions_last_session == 1);
    CHECK(e.stats().distinct_constraints_last_session == 1);
  }

  TEST_CASE("a leaf update on the three-node tree runs two constraints") {
    Engine e;
    apps::ExpTree tree(e);
    using apps::Expr;
    using apps::Op;
    const auto root = tree.build(Expr::apply(Op::Sum, Expr::leaf(10), Expr::apply(Op::Prod, Expr::leaf(2), Expr::leaf(6))));
    const auto prod = tree.child(root, apps::Side::Right);
    const auto six = tree.child(prod, apps::Side::Right);
    tree.set_leaf(six, 3);
    CHECK(tree.value(root) == 16);
    CHECK(e.stats().executions_last_session == 2);
  }

  TEST_CASE("the last stamp grows with every execution") {
    Engine e;
    const auto x = e.alloc(0);
    const auto c = e.new_constraint([&] { (void)e.get(x); });
    Stamp last = e.last_exec_stamp(c);
    for (int i = 1; i <= 5; ++i) {
      e.set(x, i);
      CHECK(e.last_exec_stamp(c) > last);
      last = e.last_exec_stamp(c);
    }
  }
}
