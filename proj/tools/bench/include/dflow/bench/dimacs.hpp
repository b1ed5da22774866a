#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "dflow/apps/shortest_paths.hpp"

namespace dflow::bench {

/// A shortest-path instance read from a DIMACS `.gr` file. Vertices are
/// renumbered from 0.
struct DimacsGraph {
  std::size_t vertex_count = 0;
  std::vector<apps::Edge> edges;
  /// Non-fatal remarks (non-positive weights, merged parallel arcs).
  std::vector<std::string> warnings;
};

/// Parses `c` comments, one `p sp <n> <m>` problem line and `a <u> <v> <w>`
/// arcs (1-based). Parallel arcs are merged keeping the smallest weight.
/// Throws Error(ParseError) naming the offending line.
DimacsGraph parse_dimacs(std::istream& in);
DimacsGraph load_dimacs(const std::filesystem::path& path);

}  // namespace dflow::bench
