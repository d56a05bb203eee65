#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "plver/allocation.hpp"
#include "plver/model.hpp"
#include "plver/replication.hpp"
#include "plver/topology.hpp"

namespace plver {

enum class Strategy { plver, abr, cort };

Strategy parse_strategy(const std::string& name);
std::string strategy_name(Strategy strategy);

struct DispatchCell {
  std::int64_t edge = 0;    // demand units served at the edge
  std::int64_t origin = 0;  // demand units sent to the origin
  Kb edge_kb = 0;
  Kb origin_kb = 0;
  std::vector<ServerId> servers;  // serving servers, first-use order
};

struct DispatchOutcome {
  TimeWindow window;
  Strategy strategy = Strategy::plver;
  std::map<DemandKey, DispatchCell> cells;
  std::map<ServerId, Kbps> consumed_bandwidth;
  Kb edge_kb = 0;
  Kb origin_kb = 0;
};

struct CortOptions {
  bool segment_granular = false;  // charge one segment, not one unit, per install
  Seconds segment_length = 10;
};

/// Reactive caches carried across windows when carry-over is enabled.
struct CortState {
  std::map<ServerId, std::set<StreamKey>> cached;
};

/// Replays one window of requests. PLVER/ABR serve a unit at the edge iff a
/// server of the group's cluster caches the stream and has bandwidth left,
/// trying planned-assignment order then id order. CORT ignores schedules: the
/// first request for (stream, server) goes to the origin and installs the
/// stream on the cluster server with the most residual bandwidth that can
/// hold it; later units hit the edge subject to bandwidth.
DispatchOutcome dispatch_window(const Topology& topology,
                                const Allocation& allocation,
                                const std::map<ClusterId, ReplicationSchedule>& schedules,
                                const ViewershipSnapshot& snapshot,
                                Strategy strategy, double alpha,
                                const CortOptions& cort_options = {},
                                CortState* cort_state = nullptr,
                                bool allow_window_mismatch = false);

/// Edge traffic over total traffic; 1.0 when there was no traffic at all.
double offloading_ratio(const DispatchOutcome& outcome);

/// Edge-served share of demand units per ladder tier; tiers without demand
/// are absent.
std::map<Kbps, double> satisfaction_by_bitrate(const DispatchOutcome& outcome);

struct WindowMetrics {
  Seconds window_start = 0;
  Strategy strategy = Strategy::plver;
  double alpha = 1.0;
  double fluctuation = 0.0;
  double offloading = 1.0;
  bool degenerate = false;  // no traffic: ratio defined as 1.0 by convention
  std::map<Kbps, double> per_bitrate_satisfaction;
  std::map<ClusterId, double> per_cluster_offloading;
  Kb edge_kb = 0;
  Kb origin_kb = 0;
};

WindowMetrics window_metrics(const DispatchOutcome& outcome,
                             const Allocation& allocation, double alpha,
                             double fluctuation);

/// Conservation and capacity checks; throws DataError on the first violation.
void validate_outcome(const DispatchOutcome& outcome,
                      const ViewershipSnapshot& snapshot,
                      const Topology& topology);

}  // namespace plver
