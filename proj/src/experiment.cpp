#include "plver/experiment.hpp"

#include <cstdio>
#include <sstream>

#include "plver/errors.hpp"

namespace plver {

namespace {

std::string fmt_ratio(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

std::string fmt_param(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

}  // namespace

std::vector<WindowMetrics> run_experiment(const Topology& topology,
                                          const Trace& trace,
                                          const Allocation& allocation,
                                          Strategy strategy, double alpha,
                                          double fluctuation,
                                          const ExperimentOptions& options) {
  if (trace.windows.empty()) throw DataError("run_experiment: empty trace");
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw ConfigError("run_experiment: alpha must be in (0, 1]");
  }
  if (fluctuation < 0.0 || fluctuation > 1.0) {
    throw ConfigError("run_experiment: fluctuation must be in [0, 1]");
  }

  std::size_t window_count = trace.windows.size();
  if (options.next_window_dispatch) {
    if (window_count < 2) {
      throw DataError("run_experiment: next-window dispatch needs two windows");
    }
    window_count -= 1;
  }
  if (options.max_windows > 0) {
    window_count = std::min<std::size_t>(window_count,
                                         static_cast<std::size_t>(options.max_windows));
  }

  CortOptions cort_options{options.cort_segment_granular, options.segment_length};
  CortState cort_state;
  CortState* carry = options.carry_over ? &cort_state : nullptr;

  std::vector<WindowMetrics> metrics;
  metrics.reserve(window_count);
  for (std::size_t w = 0; w < window_count; ++w) {
    const ViewershipSnapshot planned =
        build_snapshot(trace.windows[w], topology.groups, options.tier_mix);

    ViewershipSnapshot dispatched;
    if (options.next_window_dispatch) {
      dispatched =
          build_snapshot(trace.windows[w + 1], topology.groups, options.tier_mix);
    } else {
      dispatched = planned;
    }
    if (fluctuation > 0.0) {
      dispatched = apply_fluctuation(dispatched, fluctuation, options.seed);
    }

    std::map<ClusterId, ReplicationSchedule> schedules;
    if (strategy != Strategy::cort) {
      for (const auto& [cluster_id, roster] : allocation.rosters) {
        const EdgeCluster* cluster = nullptr;
        for (const EdgeCluster& c : topology.clusters) {
          if (c.id == cluster_id) {
            cluster = &c;
            break;
          }
        }
        if (cluster == nullptr) continue;
        const std::vector<DemandItem> demand =
            demand_for_cluster(planned, allocation, cluster_id);
        if (demand.empty()) continue;
        ReplicationSchedule schedule =
            strategy == Strategy::plver
                ? plver_schedule(*cluster, roster, demand, alpha, planned.window)
                : abr_schedule(*cluster, roster, demand, alpha, planned.window);
        if (options.audit) validate_schedule(schedule, *cluster, demand);
        schedules[cluster_id] = std::move(schedule);
      }
    }

    DispatchOutcome outcome = dispatch_window(
        topology, allocation, schedules, dispatched, strategy, alpha, cort_options,
        carry, /*allow_window_mismatch=*/options.next_window_dispatch);
    if (options.audit) validate_outcome(outcome, dispatched, topology);

    metrics.push_back(window_metrics(outcome, allocation, alpha, fluctuation));
  }
  return metrics;
}

std::vector<WindowMetrics> run_experiment(const Topology& topology,
                                          const Trace& trace, Strategy strategy,
                                          double alpha, double fluctuation,
                                          const ExperimentOptions& options) {
  const Allocation allocation =
      isoa_allocate(topology.groups, topology.clusters, topology.prefs);
  return run_experiment(topology, trace, allocation, strategy, alpha, fluctuation,
                        options);
}

std::string metrics_csv_header() {
  return "window_start,strategy,alpha,fluctuation,offloading_ratio,"
         "sat_400,sat_750,sat_1000,sat_2500,edge_kb,origin_kb,degenerate\n";
}

std::string metrics_csv_row(const WindowMetrics& m) {
  std::ostringstream out;
  out << m.window_start << "," << strategy_name(m.strategy) << ","
      << fmt_param(m.alpha) << "," << fmt_param(m.fluctuation) << ","
      << fmt_ratio(m.offloading);
  for (Kbps tier : kBitrateLadder) {
    out << ",";
    auto it = m.per_bitrate_satisfaction.find(tier);
    if (it != m.per_bitrate_satisfaction.end()) out << fmt_ratio(it->second);
  }
  out << "," << m.edge_kb << "," << m.origin_kb << "," << (m.degenerate ? 1 : 0)
      << "\n";
  return out.str();
}

std::string metrics_to_csv(const std::vector<WindowMetrics>& metrics) {
  std::string out = metrics_csv_header();
  for (const WindowMetrics& m : metrics) out += metrics_csv_row(m);
  return out;
}

std::string per_cluster_csv_header() {
  return "strategy,alpha,fluctuation,cluster_id,offloading_ratio\n";
}

std::string per_cluster_csv(const std::vector<WindowMetrics>& metrics) {
  std::string out = per_cluster_csv_header();
  if (metrics.empty()) return out;
  std::map<ClusterId, std::pair<double, int>> sums;
  for (const WindowMetrics& m : metrics) {
    for (const auto& [cluster, ratio] : m.per_cluster_offloading) {
      sums[cluster].first += ratio;
      sums[cluster].second += 1;
    }
  }
  const WindowMetrics& head = metrics.front();
  for (const auto& [cluster, sum] : sums) {
    out += strategy_name(head.strategy);
    out += "," + fmt_param(head.alpha) + "," + fmt_param(head.fluctuation);
    out += "," + cluster + "," + fmt_ratio(sum.first / sum.second) + "\n";
  }
  return out;
}

double mean_offloading(const std::vector<WindowMetrics>& metrics) {
  if (metrics.empty()) return 0.0;
  double sum = 0.0;
  for (const WindowMetrics& m : metrics) sum += m.offloading;
  return sum / static_cast<double>(metrics.size());
}

}  // namespace plver
