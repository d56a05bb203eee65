#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plver/model.hpp"
#include "plver/topology.hpp"
#include "plver/trace.hpp"

namespace plver {

struct TopologySource {
  std::string file;  // takes precedence when non-empty
  std::optional<SynthTopologyParams> synth;

  bool operator==(const TopologySource&) const = default;
};

struct TraceSource {
  std::string file;
  std::optional<SynthTraceParams> synth;

  bool operator==(const TraceSource&) const = default;
};

struct ExperimentConfig {
  std::optional<std::uint64_t> seed;
  Seconds window_s = 300;
  Seconds segment_s = 10;
  std::string out = "out";
  std::vector<std::string> strategies = {"plver", "abr", "cort"};
  std::vector<double> alphas = {0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> fluctuations = {0.0};
  TopologySource topology;
  TraceSource trace;
  bool next_window_dispatch = false;
  bool carry_over = false;
  bool cort_segment_granular = false;
  int jobs = 0;  // 0 = hardware concurrency

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError naming the offending field path.
void validate_config(const ExperimentConfig& config);

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

}  // namespace plver
