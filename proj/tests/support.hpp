#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "dflow/apps/shortest_paths.hpp"
#include "dflow/bench/oracles.hpp"
#include "dflow/engine.hpp"

namespace dflow::test {

// Records every constraint execution of an engine while alive.
class ExecLog {
 public:
  explicit ExecLog(Engine& engine) : engine_(engine) {
    engine_.set_exec_observer([this](ConstraintId id) { ids.push_back(id); });
  }
  ~ExecLog() { engine_.set_exec_observer(nullptr); }

  std::size_t count(ConstraintId id) const {
    return static_cast<std::size_t>(std::count(ids.begin(), ids.end(), id));
  }
  std::size_t distinct() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> keys;
    for (auto id : ids) keys.emplace_back(id.index, id.generation);
    std::sort(keys.begin(), keys.end());
    return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
  }
  void clear() { ids.clear(); }

  std::vector<ConstraintId> ids;

 private:
  Engine& engine_;
};

inline std::uint64_t executed_since(const Engine& e, const ExecStats& before) {
  return e.stats().constraints_executed - before.constraints_executed;
}

// Small deterministic generator helpers for property tests.
struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  std::int64_t range(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
  bool coin(double p = 0.5) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }
  std::mt19937_64 rng;
};

// A random combinational circuit: gate i combines two strictly earlier
// signals, so the whole thing is a DAG with the inputs first.
struct Circuit {
  enum class Kind { Add, Xor, Max };
  struct Gate {
    Kind kind;
    std::size_t a;
    std::size_t b;
  };

  std::size_t inputs = 0;
  std::vector<Gate> gates;

  static Circuit random(Gen& g, std::size_t inputs, std::size_t gates) {
    Circuit c;
    c.inputs = inputs;
    for (std::size_t i = 0; i < gates; ++i) {
      const std::size_t avail = inputs + i;
      c.gates.push_back(Gate{static_cast<Kind>(g.index(3)), g.index(avail), g.index(avail)});
    }
    return c;
  }

  static std::int64_t apply(Kind k, std::int64_t x, std::int64_t y) {
    switch (k) {
      case Kind::Add: return dflow::bench::wrap_add(x, y);
      case Kind::Xor: return x ^ y;
      case Kind::Max: return std::max(x, y);
    }
    return 0;
  }

  std::vector<std::int64_t> evaluate(const std::vector<std::int64_t>& in) const {
    std::vector<std::int64_t> v(in);
    for (const Gate& gt : gates) v.push_back(apply(gt.kind, v[gt.a], v[gt.b]));
    return v;
  }
};

struct ReactiveCircuit {
  ReactiveCircuit(Engine& e, const Circuit& c, const std::vector<std::int64_t>& in) : engine(e), circuit(c) {
    for (auto v : in) signals.push_back(e.alloc<std::int64_t>(v));
    for (std::size_t i = 0; i < c.gates.size(); ++i) signals.push_back(e.alloc<std::int64_t>(0));
    Engine::AtomicBlock block(e);
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
      const auto out = signals[c.inputs + i];
      const auto gate = c.gates[i];
      const auto a = signals[gate.a];
      const auto b = signals[gate.b];
      gate_ids.push_back(e.new_constraint(
          [&e, out, gate, a, b] { e.set(out, Circuit::apply(gate.kind, e.get(a), e.get(b))); },
          static_cast<UserParam>(i)));
    }
  }

  std::vector<std::int64_t> values() const {
    std::vector<std::int64_t> out;
    for (auto s : signals) out.push_back(engine.peek(s));
    return out;
  }

  Engine& engine;
  const Circuit& circuit;
  std::vector<Cell<std::int64_t>> signals;
  std::vector<ConstraintId> gate_ids;
};

inline std::vector<std::int64_t> random_inputs(Gen& g, std::size_t n) {
  std::vector<std::int64_t> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(g.range(-50, 50));
  return v;
}

// Simple digraph without self-loops or parallel edges.
inline std::vector<apps::Edge> random_graph(Gen& g, std::size_t n, std::size_t m, apps::Weight max_weight = 100) {
  std::vector<apps::Edge> edges;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  while (edges.size() < m) {
    const auto u = static_cast<apps::Vertex>(g.index(n));
    const auto v = static_cast<apps::Vertex>(g.index(n));
    if (u == v || used[u][v]) continue;
    used[u][v] = true;
    edges.push_back(apps::Edge{u, v, g.range(1, max_weight)});
  }
  return edges;
}

}  // namespace dflow::test
