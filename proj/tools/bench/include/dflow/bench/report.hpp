#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dflow::bench {

struct BenchReport {
  std::string name;
  std::uint64_t n = 0;
  std::uint64_t updates = 0;
  std::uint64_t batch = 1;
  std::uint64_t seed = 0;
  std::string scheduler;
  std::uint64_t trials = 1;
  double from_scratch_ms = 0;
  double avg_propagation_ms = 0;
  double avg_cons = 0;
  double distinct_cons = 0;
  std::uint64_t peak_live_dependencies = 0;
  bool verified = false;
  /// FNV-1a over the executed constraint ids of the first trial's updates.
  std::uint64_t trace_hash = 0;
  /// First failed check, empty when verified or not verifying.
  std::string failure;
};

enum class Format { Csv, Json };

/// name,n,updates,from_scratch_ms,avg_propagation_ms,avg_cons,distinct_cons,verified
std::string csv_header();
std::string to_csv_row(const BenchReport& report);
nlohmann::ordered_json to_json(const BenchReport& report);
BenchReport from_json(const nlohmann::json& j);

/// CSV with a header line, or a JSON array, newline-terminated.
std::string emit_report(const std::vector<BenchReport>& reports, Format format);

}  // namespace dflow::bench
