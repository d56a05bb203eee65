#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plver/model.hpp"

namespace plver {

struct MetricsRow {
  Seconds window_start = 0;
  std::string strategy;
  double alpha = 1.0;
  double fluctuation = 0.0;
  double offloading = 0.0;
  std::array<std::optional<double>, 4> satisfaction;  // per ladder tier
  Kb edge_kb = 0;
  Kb origin_kb = 0;
  bool degenerate = false;
};

struct ClusterRow {
  std::string strategy;
  double alpha = 1.0;
  double fluctuation = 0.0;
  std::string cluster;
  double offloading = 0.0;
};

std::vector<MetricsRow> read_metrics_csv(const std::string& path);
std::vector<ClusterRow> read_per_cluster_csv(const std::string& path);

/// Emits offloading_vs_alpha.svg, hourly.svg, per_cluster_heatmap.svg and
/// satisfaction_by_tier.svg into `out_dir` from the CSVs in `metrics_dir`.
/// Returns the written file paths; warnings go to stderr.
std::vector<std::string> write_report(const std::string& metrics_dir,
                                      const std::string& out_dir);

}  // namespace plver
