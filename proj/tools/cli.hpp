#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wis/graph.hpp"

namespace wis::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInvalidConfig = 2;
inline constexpr int kUnsupported = 3;
inline constexpr int kNumericalFailure = 4;

/// Runs one command line (without the program name). Primary output goes to
/// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Graph selector used by every subcommand:
///   petersen | heawood | mcgee | tutte_coxeter
///   kN | complete:N | cycle:N | kM,M | bipartite:N
///   random:N:K[:GIRTH] (seeded by graph_seed) | file:PATH
Graph resolve_graph(const std::string& spec, std::uint64_t graph_seed);

}  // namespace wis::cli
