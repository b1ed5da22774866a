#include "dflow/bench/report.hpp"

#include <cstdio>

namespace dflow::bench {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string csv_header() { return "name,n,updates,from_scratch_ms,avg_propagation_ms,avg_cons,distinct_cons,verified"; }

std::string to_csv_row(const BenchReport& r) {
  return r.name + "," + std::to_string(r.n) + "," + std::to_string(r.updates) + "," + fixed(r.from_scratch_ms, 3) +
         "," + fixed(r.avg_propagation_ms, 6) + "," + fixed(r.avg_cons, 3) + "," + fixed(r.distinct_cons, 3) + "," +
         (r.verified ? "true" : "false");
}

nlohmann::ordered_json to_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["n"] = r.n;
  j["updates"] = r.updates;
  j["batch"] = r.batch;
  j["seed"] = r.seed;
  j["scheduler"] = r.scheduler;
  j["trials"] = r.trials;
  j["from_scratch_ms"] = r.from_scratch_ms;
  j["avg_propagation_ms"] = r.avg_propagation_ms;
  j["avg_cons"] = r.avg_cons;
  j["distinct_cons"] = r.distinct_cons;
  j["peak_live_dependencies"] = r.peak_live_dependencies;
  j["verified"] = r.verified;
  j["trace_hash"] = r.trace_hash;
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j;
}

BenchReport from_json(const nlohmann::json& j) {
  BenchReport r;
  r.name = j.at("name").get<std::string>();
  r.n = j.at("n").get<std::uint64_t>();
  r.updates = j.at("updates").get<std::uint64_t>();
  r.batch = j.value("batch", std::uint64_t{1});
  r.seed = j.value("seed", std::uint64_t{0});
  r.scheduler = j.value("scheduler", std::string{});
  r.trials = j.value("trials", std::uint64_t{1});
  r.from_scratch_ms = j.at("from_scratch_ms").get<double>();
  r.avg_propagation_ms = j.at("avg_propagation_ms").get<double>();
  r.avg_cons = j.at("avg_cons").get<double>();
  r.distinct_cons = j.at("distinct_cons").get<double>();
  r.peak_live_dependencies = j.value("peak_live_dependencies", std::uint64_t{0});
  r.verified = j.at("verified").get<bool>();
  r.trace_hash = j.value("trace_hash", std::uint64_t{0});
  r.failure = j.value("failure", std::string{});
  return r;
}

std::string emit_report(const std::vector<BenchReport>& reports, Format format) {
  if (format == Format::Csv) {
    std::string out = csv_header() + "\n";
    for (const auto& r : reports) out += to_csv_row(r) + "\n";
    return out;
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

}  // namespace dflow::bench
