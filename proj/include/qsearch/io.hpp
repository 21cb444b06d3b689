#pragma once

// Text output shared by the command-line tools: a deterministic comment
// header carrying the resolved configuration, and the CSV renderings of the
// library's result types.  Identical configurations produce byte-identical
// files regardless of worker count.

#include "qsearch/centrality.hpp"
#include "qsearch/classical.hpp"
#include "qsearch/evolution.hpp"
#include "qsearch/search_analysis.hpp"

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace qsearch {

inline constexpr const char* kToolName = "qsearch";
inline constexpr const char* kToolVersion = "1.0.0";

// Shortest round-trip-safe decimal rendering used in all text output.
std::string format_g15(double value);

using ConfigEntry = std::pair<std::string, std::string>;

// "# qsearch <version> <subcommand>" followed by one "# key=value" line per
// resolved configuration entry.
void write_comment_header(std::ostream& out, const std::string& subcommand,
                          const std::vector<ConfigEntry>& config);

void write_trace_csv(std::ostream& out, const EvolutionTrace<double>& trace);
void write_sweep_csv(std::ostream& out, const GammaSweep& sweep);
void write_scaling_csv(std::ostream& out, const ScalingFit& fit);
void write_classical_csv(std::ostream& out, const HittingTimes& times);
void write_centrality_csv(std::ostream& out, const CentralityTable& table);

}  // namespace qsearch
