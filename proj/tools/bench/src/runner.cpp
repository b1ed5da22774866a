#include "dflow/bench/runner.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

#include "dflow/bench/dimacs.hpp"
#include "dflow/bench/workloads.hpp"
#include "dflow/engine.hpp"

namespace dflow::bench {

std::optional<Scheduler> parse_scheduler(std::string_view text) {
  if (text == "lru") return Scheduler::Lru;
  if (text == "lifo") return Scheduler::Lifo;
  if (text == "mindist") return Scheduler::MinDist;
  return std::nullopt;
}

std::string_view to_string(Scheduler s) {
  switch (s) {
    case Scheduler::Lru:
      return "lru";
    case Scheduler::Lifo:
      return "lifo";
    case Scheduler::MinDist:
      return "mindist";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void validate(const BenchmarkSpec& spec) {
  const auto& names = workload_names();
  if (std::find(names.begin(), names.end(), spec.name) == names.end()) {
    throw Error(Errc::InvalidArgument, "unknown benchmark '" + spec.name + "'");
  }
  if (spec.graph && spec.name != "sp") throw Error(Errc::InvalidArgument, "--graph applies to sp only");
  if (spec.n < 1 && !spec.graph) throw Error(Errc::InvalidArgument, "n must be at least 1");
  if (spec.batch < 1) throw Error(Errc::InvalidArgument, "batch must be at least 1");
  if (spec.trials < 1) throw Error(Errc::InvalidArgument, "trials must be at least 1");
  if (spec.scheduler == Scheduler::MinDist && spec.name != "sp") {
    throw Error(Errc::InvalidArgument, "the mindist scheduler applies to sp only");
  }
  if (spec.structural_ratio < 0 || spec.structural_ratio > 1) {
    throw Error(Errc::InvalidArgument, "structural ratio must lie in [0, 1]");
  }
}

struct Trial {
  double from_scratch_ms = 0;
  double propagation_ms = 0;
  std::size_t updates_done = 0;
  std::uint64_t executions = 0;
  std::uint64_t distinct = 0;
  std::uint64_t peak_dependencies = 0;
  std::uint64_t trace_hash = 0xcbf29ce484222325ULL;
  std::size_t n = 0;
  std::string failure;
};

void mix(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ULL;
  }
}

Trial run_trial(const BenchmarkSpec& spec, const std::optional<DimacsGraph>& graph) {
  Trial t;
  Engine engine;
  std::vector<ConstraintId> trace;
  engine.set_exec_observer([&trace](ConstraintId id) { trace.push_back(id); });

  const WorkloadOptions options{spec.seed, spec.structural_ratio, spec.vecmat_block};
  std::unique_ptr<Workload> w =
      graph ? make_sp_workload(engine, *graph, options) : make_workload(spec.name, engine, options);
  if (spec.scheduler == Scheduler::Lifo) engine.set_comparator(Comparator::lifo());
  if (spec.scheduler == Scheduler::MinDist) engine.set_comparator(*w->min_distance_comparator());

  t.n = graph ? graph->vertex_count : spec.n;
  auto start = Clock::now();
  w->build(t.n);
  t.from_scratch_ms = ms_since(start);
  t.peak_dependencies = engine.stats().dependencies_live;

  auto check = [&](const std::string& when) {
    if (spec.verify) {
      if (auto m = w->verify()) {
        t.failure = when + ": " + *m;
        return false;
      }
    }
    if (spec.check_fixpoint) {
      if (engine.queue_size() != 0) {
        t.failure = when + ": schedule queue not empty";
        return false;
      }
      const FixpointReport fix = engine.check_fixpoint();
      if (!fix.ok) {
        t.failure = when + ": " + std::to_string(fix.violations) + " constraint(s) not at a fixpoint";
        return false;
      }
    }
    return true;
  };

  if (!check("after build")) return t;

  std::vector<ConstraintId> distinct;
  while (t.updates_done < spec.updates) {
    const std::size_t count = std::min(spec.batch, spec.updates - t.updates_done);
    trace.clear();
    start = Clock::now();
    if (spec.batch == 1) {
      w->update();
    } else {
      Engine::AtomicBlock block(engine);
      for (std::size_t i = 0; i < count; ++i) w->update();
    }
    w->settle();
    t.propagation_ms += ms_since(start);
    t.updates_done += count;

    t.executions += trace.size();
    for (ConstraintId id : trace) {
      mix(t.trace_hash, id.index);
      mix(t.trace_hash, id.generation);
    }
    distinct = trace;
    std::sort(distinct.begin(), distinct.end(), [](ConstraintId a, ConstraintId b) {
      return a.index != b.index ? a.index < b.index : a.generation < b.generation;
    });
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    t.distinct += distinct.size();
    t.peak_dependencies = std::max(t.peak_dependencies, engine.stats().dependencies_live);

    if (!check("update " + std::to_string(t.updates_done))) break;
  }
  engine.set_exec_observer(nullptr);
  return t;
}

}  // namespace

BenchReport run_benchmark(const BenchmarkSpec& spec) {
  validate(spec);
  std::optional<DimacsGraph> graph;
  if (spec.graph) graph = load_dimacs(*spec.graph);

  BenchReport r;
  r.name = spec.name;
  r.updates = spec.updates;
  r.batch = spec.batch;
  r.seed = spec.seed;
  r.scheduler = std::string(to_string(spec.scheduler));
  r.trials = spec.trials;

  double scratch = 0;
  double propagation = 0;
  std::size_t updates = 0;
  std::size_t trials = 0;
  for (std::size_t i = 0; i < spec.trials; ++i) {
    const Trial t = run_trial(spec, graph);
    ++trials;
    scratch += t.from_scratch_ms;
    propagation += t.propagation_ms;
    updates += t.updates_done;
    if (i == 0) {
      r.n = t.n;
      const double per = t.updates_done ? static_cast<double>(t.updates_done) : 1.0;
      r.avg_cons = static_cast<double>(t.executions) / per;
      r.distinct_cons = static_cast<double>(t.distinct) / per;
      r.peak_live_dependencies = t.peak_dependencies;
      r.trace_hash = t.trace_hash;
    }
    if (!t.failure.empty()) {
      r.failure = t.failure;
      break;
    }
  }
  r.trials = trials;
  r.from_scratch_ms = scratch / static_cast<double>(trials);
  r.avg_propagation_ms = updates ? propagation / static_cast<double>(updates) : 0.0;
  r.verified = spec.verify && r.failure.empty();
  return r;
}

}  // namespace dflow::bench
