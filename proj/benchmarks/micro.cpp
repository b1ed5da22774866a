#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "dflow/apps/exptree.hpp"
#include "dflow/bench/workloads.hpp"
#include "dflow/dflow.hpp"

using namespace dflow;

namespace {

void BM_ChainPropagation(benchmark::State& state) {
  Engine e;
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto head = e.alloc<std::int64_t>(0);
  auto prev = head;
  for (std::size_t i = 0; i < n; ++i) {
    const auto next = e.alloc<std::int64_t>(0);
    e.new_constraint([&e, prev, next] { e.set(next, e.get(prev) + 1); });
    prev = next;
  }
  std::int64_t v = 0;
  for (auto _ : state) e.set(head, ++v);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ChainPropagation)->Arg(10)->Arg(1000);

void BM_FanOut(benchmark::State& state) {
  Engine e;
  const auto src = e.alloc<std::int64_t>(0);
  std::vector<Cell<std::int64_t>> outs;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    const auto out = e.alloc<std::int64_t>(0);
    e.new_constraint([&e, src, out] { e.set(out, e.get(src) * 2); });
    outs.push_back(out);
  }
  std::int64_t v = 0;
  for (auto _ : state) e.set(src, ++v);
}
BENCHMARK(BM_FanOut)->Arg(16)->Arg(1024);

void BM_AtomicBatch(benchmark::State& state) {
  Engine e;
  std::vector<Cell<std::int64_t>> in;
  const auto sum = e.alloc<std::int64_t>(0);
  for (int i = 0; i < 64; ++i) in.push_back(e.alloc<std::int64_t>(i));
  e.new_constraint([&] {
    std::int64_t s = 0;
    for (auto c : in) s += e.get(c);
    e.set(sum, s);
  });
  std::int64_t v = 0;
  for (auto _ : state) {
    Engine::AtomicBlock block(e);
    for (auto c : in) e.set(c, ++v);
  }
}
BENCHMARK(BM_AtomicBatch);

void BM_ExpTreeLeaf(benchmark::State& state) {
  using namespace apps;
  std::vector<Expr> level;
  for (int i = 0; i < (1 << state.range(0)); ++i) level.push_back(Expr::leaf(i));
  while (level.size() > 1) {
    std::vector<Expr> up;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) up.push_back(Expr::apply(Op::Sum, level[i], level[i + 1]));
    level = std::move(up);
  }
  Engine e;
  ExpTree tree(e);
  TreeNode node = tree.build(level.front());
  while (!tree.is_leaf(node)) node = tree.child(node, Side::Left);
  std::int64_t v = 0;
  for (auto _ : state) tree.set_leaf(node, ++v);
}
BENCHMARK(BM_ExpTreeLeaf)->Arg(8)->Arg(14);

void BM_Workload(benchmark::State& state, const char* name) {
  Engine e;
  auto w = bench::make_workload(name, e, bench::WorkloadOptions{});
  w->build(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    w->update();
    w->settle();
  }
}
BENCHMARK_CAPTURE(BM_Workload, adder, "adder")->Arg(10'000);
BENCHMARK_CAPTURE(BM_Workload, mapper, "mapper")->Arg(10'000);
BENCHMARK_CAPTURE(BM_Workload, msorter, "msorter")->Arg(10'000);

}  // namespace

BENCHMARK_MAIN();
