#pragma once

#include <optional>
#include <string>

#include "qgraph/adjacency.hpp"
#include "qgraph/dynamics.hpp"
#include "qgraph/measures.hpp"

namespace qgraph {

/// Parsed graph file: combinatorics plus optional lengths.
struct GraphFile {
  Graph graph;
  std::optional<std::vector<double>> lengths;
};

/// Reads `{ "vertices": N, "edges": [[tail,head],...], "lengths": [...] }`;
/// lengths may be omitted for purely combinatorial commands.
GraphFile load_graph_json(const std::string& path);

void save_graph_json(const std::string& path, const GraphFile& file);

/// Lengths are required, not defaulted: silently substituting unit lengths
/// would turn a missing field into a rationally dependent metric.
MetricGraph metric_from(const GraphFile& file);

/// Shortest exact decimal form of a double (printf %.17g), locale-free.
std::string format_double(double x);

void write_spectrum_csv(const std::string& path, const SpectrumSlice& slice);
void write_census_json(const std::string& path, const Census& census);
/// One row per k-block: block end, running estimate components, running
/// standard error components (from the blocks seen so far).
void write_average_csv(const std::string& path, const BgAverage& avg, double k_max);
void write_markov_csv(const std::string& path, const ErgodicityReport& report);
void write_unitcheck_csv(const std::string& path, const UnitCrossCheck& check);

}  // namespace qgraph
