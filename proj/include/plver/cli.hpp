#pragma once

#include <string>

#include "plver/config.hpp"
#include "plver/topology.hpp"
#include "plver/trace.hpp"

namespace plver {

/// Loads or synthesizes the configured topology. Synthetic topologies without
/// an explicit demand target size themselves from `trace_for_sizing` (total
/// deployed bandwidth = total traffic demand).
Topology resolve_topology(const ExperimentConfig& config,
                          const Trace* trace_for_sizing);

Trace resolve_trace(const ExperimentConfig& config);

/// `allocate`: ISOA + greedy allocations, histograms, and the comparison CSV.
void cmd_allocate(const ExperimentConfig& config);

/// `simulate`: full strategy x alpha x fluctuation grid, metrics CSVs and a
/// summary JSON. Grid cells run concurrently up to the configured job limit;
/// output order and bytes are independent of the worker count.
void cmd_simulate(const ExperimentConfig& config);

/// `report`: SVG charts from a metrics directory.
void cmd_report(const std::string& metrics_dir, const std::string& out_dir);

/// Entry point behind main(): returns the process exit code
/// (0 ok, 2 config error, 3 data error).
int run_cli(int argc, const char* const* argv);

}  // namespace plver
