#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dflow/bench/runner.hpp"
#include "dflow/bench/workloads.hpp"
#include "dflow/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::uint64_t seed = 1;
  std::string scheduler = "lru";
  bool verify = false;
  bool check_fixpoint = false;
  std::string format = "csv";
  std::size_t trials = 3;
  std::size_t batch = 1;
};

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd.add_option("--scheduler", c.scheduler, "lru, lifo or mindist (sp only)")
      ->check(CLI::IsMember({"lru", "lifo", "mindist"}))
      ->capture_default_str();
  cmd.add_option("--batch", c.batch, "Updates per atomic block")->check(CLI::PositiveNumber)->capture_default_str();
  cmd.add_flag("--verify", c.verify, "Check against a from-scratch recomputation after every batch");
  cmd.add_flag("--check-fixpoint", c.check_fixpoint, "Also check the queue and the fixpoint after every batch");
  cmd.add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd.add_option("--trials", c.trials, "Independent trials averaged for timing")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

int report(const dflow::bench::BenchmarkSpec& spec, const Common& c) {
  const auto r = dflow::bench::run_benchmark(spec);
  std::cout << dflow::bench::emit_report({r}, c.format == "json" ? dflow::bench::Format::Json
                                                                 : dflow::bench::Format::Csv);
  if (!r.failure.empty()) {
    std::cerr << "bench: VerificationFailed: " << r.failure << "\n";
    return kExitFailed;
  }
  return kExitOk;
}

void fill(dflow::bench::BenchmarkSpec& spec, const Common& c) {
  spec.seed = c.seed;
  spec.scheduler = *dflow::bench::parse_scheduler(c.scheduler);
  spec.verify = c.verify;
  spec.check_fixpoint = c.check_fixpoint;
  spec.trials = c.trials;
  spec.batch = c.batch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental dataflow-constraint benchmarks with from-scratch verification"};
  app.require_subcommand(1);

  dflow::bench::BenchmarkSpec run_spec;
  Common run_common;
  auto* run = app.add_subcommand("run", "Run one benchmark on generated input");
  run->add_option("--name", run_spec.name, "Benchmark name")
      ->required()
      ->check(CLI::IsMember(dflow::bench::workload_names()));
  run->add_option("--n", run_spec.n, "Input size")->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--updates", run_spec.updates, "Number of random updates")->capture_default_str();
  run->add_option("--block", run_spec.vecmat_block, "vecmat rows per constraint block")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run->add_option("--structural", run_spec.structural_ratio, "Share of list updates that insert or remove")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_common(*run, run_common);

  dflow::bench::BenchmarkSpec sp_spec;
  sp_spec.name = "sp";
  Common sp_common;
  std::string graph;
  auto* sp = app.add_subcommand("sp", "Shortest paths over a DIMACS .gr graph");
  sp->add_option("--graph", graph, "DIMACS shortest-path file")->required()->check(CLI::ExistingFile);
  sp->add_option("--decreases", sp_spec.updates, "Number of weight decreases")->capture_default_str();
  add_common(*sp, sp_common);

  auto* list = app.add_subcommand("list", "Print the benchmark names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*list) {
      for (const auto& name : dflow::bench::workload_names()) std::cout << name << "\n";
      return kExitOk;
    }
    if (*run) {
      fill(run_spec, run_common);
      return report(run_spec, run_common);
    }
    fill(sp_spec, sp_common);
    sp_spec.graph = graph;
    return report(sp_spec, sp_common);
  } catch (const dflow::Error& e) {
    std::cerr << "bench: " << e.what() << "\n";
    if (e.code() == dflow::Errc::InvalidArgument) return kExitUsage;
    return kExitFailed;
  }
}
