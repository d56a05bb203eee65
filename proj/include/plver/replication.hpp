#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plver/allocation.hpp"
#include "plver/model.hpp"

namespace plver {

/// Aggregate viewership of one (group, stream) pair inside a cluster.
struct DemandItem {
  GroupId group;
  StreamKey stream;
  std::int64_t count = 0;
  Kbps per_viewer_bandwidth = 0;  // b_i, equals the stream's ladder bitrate
};

/// Traffic gained by caching stream s (bitrate b) on a server with available
/// bandwidth and N still-unassigned viewers: b * min(floor(avail/b), N).
Kbps reward(Kbps stream_bitrate, Kbps available_bandwidth,
            std::int64_t unassigned_viewers);

struct Phase3Admission {
  ServerId server;
  StreamKey stream;
  Kbps reward = 0;
  std::int64_t viewers_assigned = 0;
};

/// Per-window replication plan for one cluster: cached stream sets, residual
/// resources after planning, and the planned viewer placement in assignment
/// order (dispatch tries servers in that order first).
struct ReplicationSchedule {
  ClusterId cluster;
  TimeWindow window;
  double alpha = 1.0;
  std::map<ServerId, std::set<StreamKey>> cached;
  std::map<ServerId, Kbps> residual_bandwidth;
  std::map<ServerId, Kb> residual_cache;  // of the usable budget alpha * c_j
  std::map<DemandKey, std::vector<std::pair<ServerId, std::int64_t>>> assignments;
  std::vector<Phase3Admission> phase3_log;

  std::map<std::pair<ServerId, StreamKey>, std::int64_t> assigned_counts() const;
  /// Sum of assigned viewer bitrates (the planned served traffic rate).
  Kbps assigned_traffic() const;
};

/// Usable replication budget of a server under cost factor alpha.
Kb usable_cache(Kb cache, double alpha);

/// Demand of the groups a cluster serves, in (group, stream) order.
std::vector<DemandItem> demand_for_cluster(const ViewershipSnapshot& snapshot,
                                           const Allocation& allocation,
                                           const ClusterId& cluster);

/// Three-phase proactive scheduler: bandwidth-first knapsack packing, reward-
/// ranked cache admission, redirection of stranded viewers to existing
/// replicas, then reward-guided replication onto leftover resources.
ReplicationSchedule plver_schedule(const EdgeCluster& cluster,
                                   std::span<const GroupId> roster,
                                   std::span<const DemandItem> demand,
                                   double alpha, const TimeWindow& window);

/// Auction baseline: every server independently caches the streams with the
/// most viewers until its usable cache is exhausted; viewers are matched at
/// dispatch time.
ReplicationSchedule abr_schedule(const EdgeCluster& cluster,
                                 std::span<const GroupId> roster,
                                 std::span<const DemandItem> demand, double alpha,
                                 const TimeWindow& window);

/// Segment-keyed inverse of the per-cluster schedules.
struct ReplicationTable {
  TimeWindow window;
  std::map<StreamKey, std::vector<ServerId>> entries;  // server ids sorted
};

ReplicationTable build_replication_table(
    const std::map<ClusterId, ReplicationSchedule>& schedules,
    const TimeWindow& window);

/// Throws on any violated schedule invariant (cache budget, bandwidth,
/// assignment/caching coupling, over-assignment).
void validate_schedule(const ReplicationSchedule& schedule,
                       const EdgeCluster& cluster,
                       std::span<const DemandItem> demand);

std::string schedules_to_json(const std::map<ClusterId, ReplicationSchedule>& schedules);
std::string table_to_json(const ReplicationTable& table);

}  // namespace plver
