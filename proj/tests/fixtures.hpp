#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "plver/rng.hpp"
#include "plver/topology.hpp"

namespace plver::testfx {

// Four user groups (demands 3, 5, 6, 6) against clusters c1 (capacity 15) and
// c2 (capacity 10). Heads of the uP lists and the outcome come from the
// paper's worked example; the tails and the full cP lists are fixed
// consistently with it (c2 must rank g3 above g2).
inline Topology fig4_topology() {
  Topology t;
  auto group = [](const std::string& id, Kbps demand) {
    UserGroup g;
    g.id = id;
    g.demand = demand;
    g.population_weight = 0.25;
    return g;
  };
  t.groups = {group("g1", 3), group("g2", 5), group("g3", 6), group("g4", 6)};

  auto cluster = [](const std::string& id, Kbps bandwidth) {
    EdgeCluster c;
    c.id = id;
    c.servers.push_back(EdgeServer{id + "-s1", bandwidth, bandwidth * 300});
    return c;
  };
  t.clusters = {cluster("c1", 15), cluster("c2", 10)};

  t.prefs.uP = {{"g1", {"c1", "c2"}},
                {"g2", {"c2", "c1"}},
                {"g3", {"c2", "c1"}},
                {"g4", {"c1", "c2"}}};
  t.prefs.cP = {{"c1", {"g1", "g2", "g3", "g4"}}, {"c2", {"g3", "g1", "g4", "g2"}}};
  return t;
}

// Label-free random allocation instance with mutual partial preference lists.
inline Topology random_allocation_instance(std::uint64_t seed, int max_groups = 200,
                                           int max_clusters = 50) {
  Rng rng(seed);
  const int n = static_cast<int>(rng.uniform_int(2, max_groups));
  const int m = static_cast<int>(rng.uniform_int(1, max_clusters));

  Topology t;
  Kbps total_demand = 0;
  for (int i = 0; i < n; ++i) {
    UserGroup g;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "g%04d", i + 1);
    g.id = buf;
    g.population_weight = 1.0 / n;
    g.demand = rng.uniform_int(1, 50);
    total_demand += g.demand;
    t.groups.push_back(std::move(g));
  }

  // Total capacity near total demand, split unevenly over clusters.
  std::vector<double> shares(m);
  double share_sum = 0.0;
  for (int j = 0; j < m; ++j) {
    shares[j] = 0.2 + rng.uniform01();
    share_sum += shares[j];
  }
  const double scale = 0.8 + 0.4 * rng.uniform01();
  for (int j = 0; j < m; ++j) {
    EdgeCluster c;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "c%03d", j + 1);
    c.id = buf;
    const Kbps capacity = std::max<Kbps>(
        1, static_cast<Kbps>(static_cast<double>(total_demand) * scale *
                             (shares[j] / share_sum)));
    c.servers.push_back(EdgeServer{c.id + "-s1", capacity, capacity * 300});
    t.clusters.push_back(std::move(c));
  }

  // Partial lists: each group ranks a random non-empty subset of clusters;
  // each cluster ranks exactly the groups that rank it, shuffled.
  std::vector<std::vector<GroupId>> listed(m);
  for (int i = 0; i < n; ++i) {
    std::vector<ClusterId> list;
    for (int j = 0; j < m; ++j) {
      if (rng.uniform01() < 0.5) list.push_back(t.clusters[j].id);
    }
    if (list.empty()) list.push_back(t.clusters[rng.uniform_int(0, m - 1)].id);
    rng.shuffle(list);
    for (const ClusterId& cid : list) {
      const int j = static_cast<int>(std::stoi(cid.substr(1))) - 1;
      listed[j].push_back(t.groups[i].id);
    }
    t.prefs.uP[t.groups[i].id] = std::move(list);
  }
  for (int j = 0; j < m; ++j) {
    rng.shuffle(listed[j]);
    if (!listed[j].empty()) t.prefs.cP[t.clusters[j].id] = std::move(listed[j]);
  }
  return t;
}

// Randomized synthetic topology through the artifact's own generator.
inline Topology random_synth_topology(std::uint64_t seed, int max_groups = 200,
                                      int max_clusters = 50) {
  Rng rng(seed);
  SynthTopologyParams params;
  params.group_count = static_cast<int>(rng.uniform_int(2, max_groups));
  params.cluster_count = static_cast<int>(rng.uniform_int(1, max_clusters));
  params.seed = Rng::derive(seed, 7);
  params.target_demand = rng.uniform_int(50, 400) * 1000;
  return synthesize_topology(params);
}

}  // namespace plver::testfx
