#include "plver/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "plver/errors.hpp"
#include "plver/rng.hpp"
#include "plver/rounding.hpp"

namespace plver {

namespace {

std::string padded_id(const char* prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04d", prefix, index + 1);
  return buf;
}

struct GeoSite {
  std::string city;
  std::string county;
  std::string state;
};

std::vector<GeoSite> build_sites(const GeoParams& geo) {
  std::vector<GeoSite> sites;
  for (int s = 0; s < geo.states; ++s) {
    const std::string state = "ST" + std::to_string(s + 1);
    for (int co = 0; co < geo.counties_per_state; ++co) {
      const std::string county = state + "-CO" + std::to_string(co + 1);
      for (int ci = 0; ci < geo.cities_per_county; ++ci) {
        sites.push_back({county + "-CI" + std::to_string(ci + 1), county, state});
      }
    }
  }
  return sites;
}

}  // namespace

int preference_level(const UserGroup& g, const EdgeCluster& c) {
  const bool same_isp = g.isp == c.isp;
  if (same_isp && g.city == c.city) return 1;
  if (same_isp && g.county == c.county) return 2;
  if (!same_isp && g.city == c.city) return 3;
  if (same_isp && g.state == c.state) return 4;
  if (!same_isp && g.county == c.county) return 5;
  if (!same_isp && g.state == c.state) return 6;
  return 0;
}

LevelFn make_label_level_fn(const Topology& topology) {
  auto groups = std::make_shared<std::map<GroupId, UserGroup>>();
  auto clusters = std::make_shared<std::map<ClusterId, EdgeCluster>>();
  for (const auto& g : topology.groups) (*groups)[g.id] = g;
  for (const auto& c : topology.clusters) (*clusters)[c.id] = c;
  return [groups, clusters](const GroupId& g, const ClusterId& c) -> int {
    auto gi = groups->find(g);
    auto ci = clusters->find(c);
    if (gi == groups->end() || ci == clusters->end()) return 0;
    return preference_level(gi->second, ci->second);
  };
}

LevelFn make_positional_level_fn(const PreferenceTables& prefs) {
  auto uP = std::make_shared<std::map<GroupId, std::vector<ClusterId>>>(prefs.uP);
  return [uP](const GroupId& g, const ClusterId& c) -> int {
    auto it = uP->find(g);
    if (it == uP->end()) return 0;
    const auto& list = it->second;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] == c) return static_cast<int>(std::min<std::size_t>(i + 1, 6));
    }
    return 0;
  };
}

Topology synthesize_topology(const SynthTopologyParams& params) {
  if (params.group_count < 1 || params.cluster_count < 1) {
    throw ConfigError("synthesize_topology: group and cluster counts must be >= 1");
  }
  if (params.bandwidth_classes.empty()) {
    throw ConfigError("synthesize_topology: zero bandwidth classes");
  }
  if (params.target_demand <= 0) {
    throw ConfigError("synthesize_topology: target demand <= 0");
  }
  if (params.window_length <= 0) {
    throw ConfigError("synthesize_topology: window length must be positive");
  }

  Rng rng(params.seed);
  const std::vector<GeoSite> sites = build_sites(params.geo);
  if (sites.empty() || params.geo.isps < 1) {
    throw ConfigError("synthesize_topology: empty geo universe");
  }

  Topology topo;

  // Groups: random site + ISP, exponential population weights, demands as an
  // exact largest-remainder split of the target.
  std::vector<double> raw_weights(params.group_count, 0.0);
  double weight_sum = 0.0;
  for (int i = 0; i < params.group_count; ++i) {
    const GeoSite& site = sites[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(sites.size()) - 1))];
    UserGroup g;
    g.id = padded_id("g", i);
    g.city = site.city;
    g.county = site.county;
    g.state = site.state;
    g.isp = "ISP" + std::to_string(rng.uniform_int(1, params.geo.isps));
    raw_weights[i] = -std::log(1.0 - rng.uniform01());
    weight_sum += raw_weights[i];
    topo.groups.push_back(std::move(g));
  }
  for (int i = 0; i < params.group_count; ++i) {
    topo.groups[i].population_weight = raw_weights[i] / weight_sum;
  }
  const std::vector<std::int64_t> demands =
      largest_remainder_split(params.target_demand, raw_weights);
  Kbps total_demand = 0;
  for (int i = 0; i < params.group_count; ++i) {
    topo.groups[i].demand = std::max<Kbps>(1, demands[i]);
    total_demand += topo.groups[i].demand;
  }

  // Clusters, then servers round-robin over clusters and bandwidth classes
  // until the deployed bandwidth covers the total demand and every cluster is
  // non-empty.
  for (int i = 0; i < params.cluster_count; ++i) {
    const GeoSite& site = sites[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(sites.size()) - 1))];
    EdgeCluster c;
    c.id = padded_id("c", i);
    c.city = site.city;
    c.county = site.county;
    c.state = site.state;
    c.isp = "ISP" + std::to_string(rng.uniform_int(1, params.geo.isps));
    topo.clusters.push_back(std::move(c));
  }
  Kbps deployed = 0;
  int round = 0;
  while (deployed < total_demand || round < params.cluster_count) {
    EdgeCluster& cluster = topo.clusters[round % params.cluster_count];
    const Kbps bw =
        params.bandwidth_classes[round % params.bandwidth_classes.size()];
    EdgeServer server;
    server.id = cluster.id + "-s" +
                std::to_string(static_cast<int>(cluster.servers.size()) + 1);
    server.bandwidth = bw;
    const Kb b_hat = bw * params.window_length;
    server.cache = rng.uniform_int(b_hat / 2 + 1, 2 * b_hat - 1);
    cluster.servers.push_back(std::move(server));
    deployed += bw;
    ++round;
  }

  // uP: clusters bucketed by preference level, seeded shuffle within a level.
  for (const UserGroup& g : topo.groups) {
    std::array<std::vector<ClusterId>, 7> buckets;
    for (const EdgeCluster& c : topo.clusters) {
      const int level = preference_level(g, c);
      if (level > 0) buckets[level].push_back(c.id);
    }
    std::vector<ClusterId> list;
    for (int level = 1; level <= 6; ++level) {
      rng.shuffle(buckets[level]);
      list.insert(list.end(), buckets[level].begin(), buckets[level].end());
    }
    if (!list.empty()) topo.prefs.uP[g.id] = std::move(list);
  }

  // cP mirrors the level rules; within a level, demand descending with seeded
  // shuffle as the tie-break.
  for (const EdgeCluster& c : topo.clusters) {
    std::array<std::vector<const UserGroup*>, 7> buckets;
    for (const UserGroup& g : topo.groups) {
      const int level = preference_level(g, c);
      if (level > 0) buckets[level].push_back(&g);
    }
    std::vector<GroupId> list;
    for (int level = 1; level <= 6; ++level) {
      rng.shuffle(buckets[level]);
      std::stable_sort(buckets[level].begin(), buckets[level].end(),
                       [](const UserGroup* a, const UserGroup* b) {
                         return a->demand > b->demand;
                       });
      for (const UserGroup* g : buckets[level]) list.push_back(g->id);
    }
    if (!list.empty()) topo.prefs.cP[c.id] = std::move(list);
  }

  return topo;
}

namespace {

using nlohmann::json;

json group_to_json(const UserGroup& g) {
  return json{{"id", g.id},
              {"isp", g.isp},
              {"city", g.city},
              {"county", g.county},
              {"state", g.state},
              {"population_weight", g.population_weight},
              {"demand_kbps", g.demand}};
}

json cluster_to_json(const EdgeCluster& c) {
  json servers = json::array();
  for (const EdgeServer& s : c.servers) {
    servers.push_back(json{
        {"id", s.id}, {"bandwidth_kbps", s.bandwidth}, {"cache_kb", s.cache}});
  }
  return json{{"id", c.id},     {"isp", c.isp},     {"city", c.city},
              {"county", c.county}, {"state", c.state}, {"servers", servers}};
}

void validate_topology(const Topology& topo) {
  std::set<GroupId> group_ids;
  std::set<ClusterId> cluster_ids;
  std::set<ServerId> server_ids;
  double weight_sum = 0.0;
  for (const auto& g : topo.groups) {
    if (!group_ids.insert(g.id).second)
      throw DataError("topology: duplicate group id " + g.id);
    if (g.population_weight < 0.0)
      throw DataError("topology: negative population weight for " + g.id);
    if (g.demand < 0) throw DataError("topology: negative demand for " + g.id);
    weight_sum += g.population_weight;
  }
  if (!topo.groups.empty() && std::abs(weight_sum - 1.0) > 1e-9) {
    throw DataError("topology: population weights must sum to 1");
  }
  for (const auto& c : topo.clusters) {
    if (!cluster_ids.insert(c.id).second)
      throw DataError("topology: duplicate cluster id " + c.id);
    if (c.servers.empty())
      throw DataError("topology: cluster " + c.id + " has no servers");
    for (const auto& s : c.servers) {
      if (!server_ids.insert(s.id).second)
        throw DataError("topology: duplicate server id " + s.id);
      if (s.bandwidth <= 0 || s.cache <= 0)
        throw DataError("topology: server " + s.id +
                        " needs positive bandwidth and cache");
    }
  }
  for (const auto& [gid, list] : topo.prefs.uP) {
    if (!group_ids.count(gid))
      throw DataError("topology: preference list for unknown group " + gid);
    std::set<ClusterId> seen;
    for (const auto& cid : list) {
      if (!cluster_ids.count(cid))
        throw DataError("topology: group " + gid + " ranks unknown cluster " + cid);
      if (!seen.insert(cid).second)
        throw DataError("topology: group " + gid + " ranks " + cid + " twice");
    }
  }
  for (const auto& [cid, list] : topo.prefs.cP) {
    if (!cluster_ids.count(cid))
      throw DataError("topology: preference list for unknown cluster " + cid);
    std::set<GroupId> seen;
    for (const auto& gid : list) {
      if (!group_ids.count(gid))
        throw DataError("topology: cluster " + cid + " ranks unknown group " + gid);
      if (!seen.insert(gid).second)
        throw DataError("topology: cluster " + cid + " ranks " + gid + " twice");
    }
  }
}

}  // namespace

std::string topology_to_json(const Topology& topo) {
  json doc;
  doc["groups"] = json::array();
  for (const auto& g : topo.groups) doc["groups"].push_back(group_to_json(g));
  doc["clusters"] = json::array();
  for (const auto& c : topo.clusters) doc["clusters"].push_back(cluster_to_json(c));
  json prefs;
  prefs["groups"] = json::object();
  for (const auto& [gid, list] : topo.prefs.uP) prefs["groups"][gid] = list;
  prefs["clusters"] = json::object();
  for (const auto& [cid, list] : topo.prefs.cP) prefs["clusters"][cid] = list;
  doc["preferences"] = prefs;
  return doc.dump(2) + "\n";
}

Topology topology_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("topology: invalid JSON: ") + e.what());
  }
  Topology topo;
  try {
    for (const auto& jg : doc.at("groups")) {
      UserGroup g;
      g.id = jg.at("id").get<std::string>();
      g.isp = jg.value("isp", "");
      g.city = jg.value("city", "");
      g.county = jg.value("county", "");
      g.state = jg.value("state", "");
      g.population_weight = jg.value("population_weight", 0.0);
      g.demand = jg.value("demand_kbps", Kbps{0});
      topo.groups.push_back(std::move(g));
    }
    for (const auto& jc : doc.at("clusters")) {
      EdgeCluster c;
      c.id = jc.at("id").get<std::string>();
      c.isp = jc.value("isp", "");
      c.city = jc.value("city", "");
      c.county = jc.value("county", "");
      c.state = jc.value("state", "");
      for (const auto& js : jc.at("servers")) {
        EdgeServer s;
        s.id = js.at("id").get<std::string>();
        s.bandwidth = js.at("bandwidth_kbps").get<Kbps>();
        s.cache = js.at("cache_kb").get<Kb>();
        c.servers.push_back(std::move(s));
      }
      topo.clusters.push_back(std::move(c));
    }
    const auto& prefs = doc.at("preferences");
    for (const auto& [gid, list] : prefs.at("groups").items()) {
      topo.prefs.uP[gid] = list.get<std::vector<ClusterId>>();
    }
    for (const auto& [cid, list] : prefs.at("clusters").items()) {
      topo.prefs.cP[cid] = list.get<std::vector<GroupId>>();
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("topology: bad document structure: ") + e.what());
  }
  validate_topology(topo);
  return topo;
}

void save_topology(const std::string& path, const Topology& topo) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("topology: cannot open " + path + " for writing");
  out << topology_to_json(topo);
}

Topology load_topology(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("topology: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return topology_from_json(buf.str());
}

}  // namespace plver
