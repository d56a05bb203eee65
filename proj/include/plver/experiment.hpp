#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plver/allocation.hpp"
#include "plver/simulator.hpp"
#include "plver/trace.hpp"
#include "plver/viewership.hpp"

namespace plver {

struct ExperimentOptions {
  std::uint64_t seed = 0;
  bool audit = true;                 // invariant checks every window
  bool next_window_dispatch = false; // dispatch window t+1 against schedules from t
  bool carry_over = false;           // CORT caches persist across windows
  bool cort_segment_granular = false;
  Seconds segment_length = 10;
  TierMix tier_mix = uniform_tier_mix();
  int max_windows = 0;  // 0 = all trace windows
};

/// Windowed replay: build the window's snapshot, schedule per strategy, then
/// dispatch (on the fluctuated copy when fluctuation > 0) and emit metrics.
/// Deterministic under (inputs, seed).
std::vector<WindowMetrics> run_experiment(const Topology& topology,
                                          const Trace& trace,
                                          const Allocation& allocation,
                                          Strategy strategy, double alpha,
                                          double fluctuation,
                                          const ExperimentOptions& options);

/// Convenience overload: allocates with ISOA first.
std::vector<WindowMetrics> run_experiment(const Topology& topology,
                                          const Trace& trace, Strategy strategy,
                                          double alpha, double fluctuation,
                                          const ExperimentOptions& options);

std::string metrics_csv_header();
std::string metrics_csv_row(const WindowMetrics& m);
std::string metrics_to_csv(const std::vector<WindowMetrics>& metrics);

std::string per_cluster_csv_header();
/// One row per cluster: offloading averaged over the run's windows.
std::string per_cluster_csv(const std::vector<WindowMetrics>& metrics);

double mean_offloading(const std::vector<WindowMetrics>& metrics);

}  // namespace plver
