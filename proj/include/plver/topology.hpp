#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "plver/model.hpp"

namespace plver {

/// Shared label universe for groups and clusters. Cities nest in counties,
/// counties in states; ISPs cross-cut the hierarchy.
struct GeoParams {
  int states = 2;
  int counties_per_state = 3;
  int cities_per_county = 4;
  int isps = 5;

  bool operator==(const GeoParams&) const = default;
};

struct SynthTopologyParams {
  int group_count = 0;
  int cluster_count = 0;
  std::vector<Kbps> bandwidth_classes = {5000, 10000, 20000, 40000, 80000};
  Seconds window_length = 300;
  std::uint64_t seed = 0;
  Kbps target_demand = 0;  // total group demand; server deployment matches it
  GeoParams geo;

  bool operator==(const SynthTopologyParams&) const = default;
};

struct Topology {
  std::vector<UserGroup> groups;
  std::vector<EdgeCluster> clusters;
  PreferenceTables prefs;
};

/// Preference priority of cluster `c` for group `g`: 1 (same ISP, same city)
/// down to 6 (same state, different ISP); 0 when no level applies (mutually
/// unmatchable, e.g. different states).
int preference_level(const UserGroup& g, const EdgeCluster& c);

using LevelFn = std::function<int(const GroupId&, const ClusterId&)>;

/// Level lookup backed by the topology's geo labels.
LevelFn make_label_level_fn(const Topology& topology);

/// Fallback for label-free topologies: a group's assigned cluster gets the
/// level of its position in uP (capped at 6).
LevelFn make_positional_level_fn(const PreferenceTables& prefs);

/// Deterministic generator: same (params, seed) gives a byte-identical
/// serialized topology. Servers are appended round-robin over clusters and
/// bandwidth classes until their total bandwidth covers the total demand;
/// caches are drawn uniformly from the open range (0.5*bw*T, 2*bw*T).
Topology synthesize_topology(const SynthTopologyParams& params);

std::string topology_to_json(const Topology& topology);
Topology topology_from_json(const std::string& text);
void save_topology(const std::string& path, const Topology& topology);
Topology load_topology(const std::string& path);

}  // namespace plver
