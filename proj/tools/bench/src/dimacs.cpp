#include "dflow/bench/dimacs.hpp"

#include <charconv>
#include <fstream>
#include <string_view>
#include <unordered_map>

#include "dflow/errors.hpp"

namespace dflow::bench {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <class T>
T number(std::string_view token, std::size_t line, const char* field) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    fail(line, std::string("bad ") + field + " '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

DimacsGraph parse_dimacs(std::istream& in) {
  DimacsGraph g;
  bool have_problem = false;
  std::size_t declared_arcs = 0;
  std::unordered_map<std::uint64_t, std::size_t> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto tok = split(text);
    if (tok.empty() || tok[0] == "c") continue;
    if (tok[0] == "p") {
      if (have_problem) fail(line, "second problem line");
      if (tok.size() != 4 || tok[1] != "sp") fail(line, "expected 'p sp <nodes> <arcs>'");
      g.vertex_count = number<std::size_t>(tok[2], line, "node count");
      declared_arcs = number<std::size_t>(tok[3], line, "arc count");
      if (g.vertex_count == 0) fail(line, "graph has no nodes");
      if (g.vertex_count > apps::Vertex(-1)) fail(line, "too many nodes");
      g.edges.reserve(declared_arcs);
      have_problem = true;
    } else if (tok[0] == "a") {
      if (!have_problem) fail(line, "arc before problem line");
      if (tok.size() != 4) fail(line, "expected 'a <from> <to> <weight>'");
      const auto u = number<std::size_t>(tok[1], line, "source node");
      const auto v = number<std::size_t>(tok[2], line, "target node");
      const auto w = number<apps::Weight>(tok[3], line, "weight");
      if (u < 1 || u > g.vertex_count) fail(line, "node " + std::to_string(u) + " out of range");
      if (v < 1 || v > g.vertex_count) fail(line, "node " + std::to_string(v) + " out of range");
      if (w <= 0) g.warnings.push_back("line " + std::to_string(line) + ": non-positive weight " + std::to_string(w));
      const apps::Edge e{static_cast<apps::Vertex>(u - 1), static_cast<apps::Vertex>(v - 1), w};
      const std::uint64_t key = (std::uint64_t{e.from} << 32) | e.to;
      if (const auto it = seen.find(key); it != seen.end()) {
        g.warnings.push_back("line " + std::to_string(line) + ": parallel arc " + std::to_string(u) + " -> " +
                             std::to_string(v) + " merged");
        auto& kept = g.edges[it->second].weight;
        if (w < kept) kept = w;
        continue;
      }
      seen.emplace(key, g.edges.size());
      g.edges.push_back(e);
    } else {
      fail(line, "unknown line type '" + std::string(tok[0]) + "'");
    }
  }
  if (!have_problem) fail(line, "missing problem line");
  return g;
}

DimacsGraph load_dimacs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  return parse_dimacs(in);
}

}  // namespace dflow::bench
