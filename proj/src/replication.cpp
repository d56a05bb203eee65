#include "plver/replication.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "plver/errors.hpp"
#include "plver/mkp.hpp"

namespace plver {

Kbps reward(Kbps stream_bitrate, Kbps available_bandwidth,
            std::int64_t unassigned_viewers) {
  if (stream_bitrate <= 0) throw std::invalid_argument("reward: bitrate must be positive");
  if (available_bandwidth < 0 || unassigned_viewers < 0) {
    throw std::invalid_argument("reward: negative bandwidth or viewer count");
  }
  const std::int64_t by_bandwidth = available_bandwidth / stream_bitrate;
  return stream_bitrate * std::min<std::int64_t>(by_bandwidth, unassigned_viewers);
}

Kb usable_cache(Kb cache, double alpha) {
  return static_cast<Kb>(std::floor(alpha * static_cast<double>(cache) + 1e-9));
}

std::map<std::pair<ServerId, StreamKey>, std::int64_t>
ReplicationSchedule::assigned_counts() const {
  std::map<std::pair<ServerId, StreamKey>, std::int64_t> out;
  for (const auto& [key, placements] : assignments) {
    for (const auto& [server, count] : placements) {
      out[{server, key.stream}] += count;
    }
  }
  return out;
}

Kbps ReplicationSchedule::assigned_traffic() const {
  Kbps total = 0;
  for (const auto& [key, placements] : assignments) {
    for (const auto& [server, count] : placements) {
      total += count * key.stream.bitrate;
    }
  }
  return total;
}

std::vector<DemandItem> demand_for_cluster(const ViewershipSnapshot& snapshot,
                                           const Allocation& allocation,
                                           const ClusterId& cluster) {
  std::vector<DemandItem> demand;
  for (const auto& [key, count] : snapshot.counts) {
    if (count <= 0) continue;
    auto it = allocation.assigned.find(key.group);
    if (it == allocation.assigned.end() || it->second != cluster) continue;
    demand.push_back(DemandItem{key.group, key.stream, count, key.stream.bitrate});
  }
  return demand;
}

namespace {

struct Unit {
  DemandKey key;
  Kbps bitrate = 0;
  int server = -1;  // index into the sorted server list
};

struct SchedulerState {
  std::vector<EdgeServer> servers;  // sorted by id
  std::vector<Kbps> bandwidth;      // residual
  std::vector<Kb> cache;            // residual usable budget
  std::vector<std::set<StreamKey>> cached;
  std::vector<Unit> units;
  std::map<StreamKey, std::int64_t> unassigned;  // N_s
  std::map<StreamKey, Kb> segment_size;
};

void check_demand(const EdgeCluster& cluster, std::span<const GroupId> roster,
                  std::span<const DemandItem> demand, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw ConfigError("schedule: alpha must be in (0, 1]");
  }
  std::set<GroupId> members(roster.begin(), roster.end());
  for (const DemandItem& item : demand) {
    if (!members.count(item.group)) {
      throw DataError("schedule: demand for group " + item.group +
                      " outside the roster of cluster " + cluster.id);
    }
    if (item.count < 1) {
      throw DataError("schedule: demand item with count < 1 for group " + item.group);
    }
    if (item.per_viewer_bandwidth != item.stream.bitrate) {
      throw DataError("schedule: per-viewer bandwidth must equal the stream bitrate");
    }
  }
}

SchedulerState init_state(const EdgeCluster& cluster,
                          std::span<const DemandItem> demand, double alpha,
                          const TimeWindow& window) {
  SchedulerState st;
  st.servers = cluster.servers;
  std::sort(st.servers.begin(), st.servers.end(),
            [](const EdgeServer& a, const EdgeServer& b) { return a.id < b.id; });
  st.bandwidth.reserve(st.servers.size());
  st.cache.reserve(st.servers.size());
  st.cached.resize(st.servers.size());
  for (const EdgeServer& s : st.servers) {
    st.bandwidth.push_back(s.bandwidth);
    st.cache.push_back(usable_cache(s.cache, alpha));
  }
  for (const DemandItem& item : demand) {
    for (std::int64_t k = 0; k < item.count; ++k) {
      st.units.push_back(Unit{DemandKey{item.group, item.stream},
                              item.per_viewer_bandwidth, -1});
    }
    st.unassigned[item.stream] += item.count;
    st.segment_size[item.stream] = segment_set_size(item.stream.bitrate, window);
  }
  return st;
}

void record_assignment(ReplicationSchedule& schedule, const DemandKey& key,
                       const ServerId& server, std::int64_t count) {
  auto& placements = schedule.assignments[key];
  if (!placements.empty() && placements.back().first == server) {
    placements.back().second += count;
  } else {
    placements.push_back({server, count});
  }
}

ReplicationSchedule finish(const EdgeCluster& cluster, double alpha,
                           const TimeWindow& window, const SchedulerState& st,
                           ReplicationSchedule schedule) {
  schedule.cluster = cluster.id;
  schedule.window = window;
  schedule.alpha = alpha;
  for (std::size_t j = 0; j < st.servers.size(); ++j) {
    if (!st.cached[j].empty()) schedule.cached[st.servers[j].id] = st.cached[j];
    schedule.residual_bandwidth[st.servers[j].id] = st.bandwidth[j];
    schedule.residual_cache[st.servers[j].id] = st.cache[j];
  }
  return schedule;
}

}  // namespace

ReplicationSchedule plver_schedule(const EdgeCluster& cluster,
                                   std::span<const GroupId> roster,
                                   std::span<const DemandItem> demand,
                                   double alpha, const TimeWindow& window) {
  check_demand(cluster, roster, demand, alpha);
  SchedulerState st = init_state(cluster, demand, alpha, window);
  ReplicationSchedule schedule;

  // Phase 1: pack viewers against bandwidth alone, then admit each server's
  // packed streams by reward until its cache budget runs out.
  std::vector<MkpItem> items;
  items.reserve(st.units.size());
  for (const Unit& u : st.units) {
    items.push_back(MkpItem{u.key.stream, u.key.group, u.bitrate});
  }
  std::vector<MkpBin> bins;
  bins.reserve(st.servers.size());
  for (const EdgeServer& s : st.servers) bins.push_back(MkpBin{s.id, s.bandwidth});
  const MkpResult packing = solve_mkp_greedy(items, bins);

  for (std::size_t j = 0; j < st.servers.size(); ++j) {
    std::set<StreamKey> pending;  // packed on j, not yet admitted or skipped
    for (std::size_t i = 0; i < st.units.size(); ++i) {
      if (packing.assignment[i] == static_cast<int>(j)) {
        pending.insert(st.units[i].key.stream);
      }
    }
    while (!pending.empty()) {
      // Max reward under the current bandwidth/assignment state.
      StreamKey pick;
      Kbps best = -1;
      for (const StreamKey& s : pending) {
        const Kbps r = reward(s.bitrate, st.bandwidth[j], st.unassigned[s]);
        if (r > best) {
          best = r;
          pick = s;
        }
      }
      pending.erase(pick);
      if (st.segment_size[pick] > st.cache[j]) continue;  // skipped for cache

      st.cached[j].insert(pick);
      st.cache[j] -= st.segment_size[pick];
      for (std::size_t i = 0; i < st.units.size(); ++i) {
        Unit& u = st.units[i];
        if (packing.assignment[i] == static_cast<int>(j) && u.server < 0 &&
            u.key.stream == pick) {
          u.server = static_cast<int>(j);
          st.bandwidth[j] -= u.bitrate;
          st.unassigned[pick] -= 1;
          record_assignment(schedule, u.key, st.servers[j].id, 1);
        }
      }
    }
  }

  // Phase 2: stranded viewers go to any server that already holds their
  // stream and has bandwidth left, scanned in id order.
  for (Unit& u : st.units) {
    if (u.server >= 0) continue;
    for (std::size_t j = 0; j < st.servers.size(); ++j) {
      if (st.cached[j].count(u.key.stream) && st.bandwidth[j] >= u.bitrate) {
        u.server = static_cast<int>(j);
        st.bandwidth[j] -= u.bitrate;
        st.unassigned[u.key.stream] -= 1;
        record_assignment(schedule, u.key, st.servers[j].id, 1);
        break;
      }
    }
  }

  // Phase 3: replicate onto leftover resources, highest reward first. Each
  // admission assigns phi = R/b viewers and consumes exactly R bandwidth, so
  // resources only shrink and one pass over servers suffices.
  for (std::size_t j = 0; j < st.servers.size(); ++j) {
    while (true) {
      StreamKey pick;
      Kbps best = 0;
      for (const auto& [s, n] : st.unassigned) {
        if (n <= 0 || st.cached[j].count(s)) continue;
        if (st.segment_size[s] > st.cache[j]) continue;
        const Kbps r = reward(s.bitrate, st.bandwidth[j], n);
        if (r > best) {
          best = r;
          pick = s;
        }
      }
      if (best <= 0) break;

      st.cached[j].insert(pick);
      st.cache[j] -= st.segment_size[pick];
      st.bandwidth[j] -= best;
      std::int64_t phi = best / pick.bitrate;
      schedule.phase3_log.push_back(
          Phase3Admission{st.servers[j].id, pick, best, phi});
      for (Unit& u : st.units) {
        if (phi == 0) break;
        if (u.server < 0 && u.key.stream == pick) {
          u.server = static_cast<int>(j);
          st.unassigned[pick] -= 1;
          record_assignment(schedule, u.key, st.servers[j].id, 1);
          --phi;
        }
      }
    }
  }

  return finish(cluster, alpha, window, st, std::move(schedule));
}

ReplicationSchedule abr_schedule(const EdgeCluster& cluster,
                                 std::span<const GroupId> roster,
                                 std::span<const DemandItem> demand, double alpha,
                                 const TimeWindow& window) {
  check_demand(cluster, roster, demand, alpha);
  SchedulerState st = init_state(cluster, demand, alpha, window);

  // Streams ranked by cluster-wide viewer count, descending; ties by id.
  std::vector<std::pair<StreamKey, std::int64_t>> ranked(st.unassigned.begin(),
                                                         st.unassigned.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  for (std::size_t j = 0; j < st.servers.size(); ++j) {
    for (const auto& [stream, viewers] : ranked) {
      if (st.segment_size[stream] <= st.cache[j]) {
        st.cached[j].insert(stream);
        st.cache[j] -= st.segment_size[stream];
      }
    }
  }

  // No planned placement: ABR matches viewers at dispatch time.
  return finish(cluster, alpha, window, st, ReplicationSchedule{});
}

ReplicationTable build_replication_table(
    const std::map<ClusterId, ReplicationSchedule>& schedules,
    const TimeWindow& window) {
  ReplicationTable table;
  table.window = window;
  for (const auto& [cluster, schedule] : schedules) {
    if (schedule.window != window) {
      throw DataError("replication table: schedule for cluster " + cluster +
                      " covers a different window");
    }
    for (const auto& [server, streams] : schedule.cached) {
      for (const StreamKey& s : streams) table.entries[s].push_back(server);
    }
  }
  for (auto& [stream, servers] : table.entries) {
    std::sort(servers.begin(), servers.end());
  }
  return table;
}

void validate_schedule(const ReplicationSchedule& schedule,
                       const EdgeCluster& cluster,
                       std::span<const DemandItem> demand) {
  std::map<ServerId, const EdgeServer*> servers;
  for (const EdgeServer& s : cluster.servers) servers[s.id] = &s;

  for (const auto& [server, streams] : schedule.cached) {
    auto it = servers.find(server);
    if (it == servers.end()) {
      throw DataError("schedule: caches on unknown server " + server);
    }
    Kb used = 0;
    for (const StreamKey& s : streams) {
      used += segment_set_size(s.bitrate, schedule.window);
    }
    if (used > usable_cache(it->second->cache, schedule.alpha)) {
      throw DataError("schedule: cache budget exceeded on server " + server);
    }
  }

  std::map<ServerId, Kbps> load;
  std::map<DemandKey, std::int64_t> assigned_per_key;
  for (const auto& [key, placements] : schedule.assignments) {
    for (const auto& [server, count] : placements) {
      auto it = servers.find(server);
      if (it == servers.end()) {
        throw DataError("schedule: assignment to unknown server " + server);
      }
      auto cit = schedule.cached.find(server);
      if (cit == schedule.cached.end() || !cit->second.count(key.stream)) {
        throw DataError("schedule: viewers assigned to server " + server +
                        " which does not cache their stream");
      }
      load[server] += count * key.stream.bitrate;
      assigned_per_key[key] += count;
    }
  }
  for (const auto& [server, used] : load) {
    if (used > servers[server]->bandwidth) {
      throw DataError("schedule: bandwidth exceeded on server " + server);
    }
  }
  std::map<DemandKey, std::int64_t> demanded;
  for (const DemandItem& item : demand) {
    demanded[DemandKey{item.group, item.stream}] += item.count;
  }
  for (const auto& [key, count] : assigned_per_key) {
    auto it = demanded.find(key);
    if (it == demanded.end() || count > it->second) {
      throw DataError("schedule: more viewers assigned than demanded for group " +
                      key.group);
    }
  }
}

namespace {

nlohmann::json stream_to_json(const StreamKey& s) {
  return nlohmann::json{{"channel", s.channel}, {"bitrate_kbps", s.bitrate}};
}

}  // namespace

std::string schedules_to_json(
    const std::map<ClusterId, ReplicationSchedule>& schedules) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& [cluster, schedule] : schedules) {
    nlohmann::json entry;
    entry["cluster"] = cluster;
    entry["window"] = {{"start", schedule.window.start},
                       {"length", schedule.window.length}};
    entry["alpha"] = schedule.alpha;
    nlohmann::json servers = nlohmann::json::object();
    for (const auto& [server, streams] : schedule.cached) {
      nlohmann::json cached = nlohmann::json::array();
      for (const StreamKey& s : streams) cached.push_back(stream_to_json(s));
      servers[server] = {
          {"cached", cached},
          {"residual_bandwidth_kbps", schedule.residual_bandwidth.at(server)},
          {"residual_cache_kb", schedule.residual_cache.at(server)}};
    }
    entry["servers"] = servers;
    doc.push_back(entry);
  }
  return doc.dump(2) + "\n";
}

std::string table_to_json(const ReplicationTable& table) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& [stream, servers] : table.entries) {
    doc.push_back(nlohmann::json{{"channel", stream.channel},
                                 {"bitrate_kbps", stream.bitrate},
                                 {"window_start", table.window.start},
                                 {"servers", servers}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace plver
