#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "dflow/bench/report.hpp"

namespace dflow::bench {

enum class Scheduler { Lru, Lifo, MinDist };

std::optional<Scheduler> parse_scheduler(std::string_view text);
std::string_view to_string(Scheduler s);

struct BenchmarkSpec {
  std::string name;
  std::size_t n = 1000;
  std::size_t updates = 100;
  std::size_t batch = 1;
  std::uint64_t seed = 1;
  Scheduler scheduler = Scheduler::Lru;
  /// Compare against the from-scratch oracle after every batch.
  bool verify = false;
  /// After every batch, also require an empty queue and a store that
  /// re-running every constraint leaves unchanged.
  bool check_fixpoint = false;
  std::size_t trials = 3;
  std::size_t vecmat_block = 1;
  double structural_ratio = 0.5;
  /// DIMACS input for `sp`; n is then taken from the file.
  std::optional<std::filesystem::path> graph;
};

/// Throws Error(InvalidArgument) for a malformed spec. A failed check does
/// not throw: the report comes back with verified = false and the reason.
BenchReport run_benchmark(const BenchmarkSpec& spec);

}  // namespace dflow::bench
