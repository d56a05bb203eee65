#include "plver/simulator.hpp"

#include <algorithm>

#include "plver/errors.hpp"

namespace plver {

Strategy parse_strategy(const std::string& name) {
  if (name == "plver") return Strategy::plver;
  if (name == "abr") return Strategy::abr;
  if (name == "cort") return Strategy::cort;
  throw ConfigError("unknown strategy name: " + name);
}

std::string strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::plver: return "plver";
    case Strategy::abr: return "abr";
    case Strategy::cort: return "cort";
  }
  return "?";
}

namespace {

struct ServerDispatch {
  const EdgeServer* server = nullptr;
  Kbps consumed = 0;
  Kb cache_used = 0;  // CORT only: against the usable budget
};

struct ClusterDispatch {
  std::vector<ServerId> order;  // id ascending
  std::map<ServerId, ServerDispatch> servers;
  const ReplicationSchedule* schedule = nullptr;
};

void serve_edge(DispatchOutcome& out, DispatchCell& cell, ServerDispatch& sd,
                const ServerId& server, Kbps bitrate, Kb size) {
  sd.consumed += bitrate;
  out.consumed_bandwidth[server] += bitrate;
  cell.edge += 1;
  cell.edge_kb += size;
  out.edge_kb += size;
  if (std::find(cell.servers.begin(), cell.servers.end(), server) ==
      cell.servers.end()) {
    cell.servers.push_back(server);
  }
}

}  // namespace

DispatchOutcome dispatch_window(const Topology& topology,
                                const Allocation& allocation,
                                const std::map<ClusterId, ReplicationSchedule>& schedules,
                                const ViewershipSnapshot& snapshot,
                                Strategy strategy, double alpha,
                                const CortOptions& cort_options,
                                CortState* cort_state,
                                bool allow_window_mismatch) {
  if (!allow_window_mismatch) {
    for (const auto& [cluster, schedule] : schedules) {
      if (schedule.window != snapshot.window) {
        throw DataError("dispatch: snapshot window does not match the schedule for "
                        "cluster " + cluster);
      }
    }
  }

  DispatchOutcome out;
  out.window = snapshot.window;
  out.strategy = strategy;

  std::map<ClusterId, ClusterDispatch> clusters;
  for (const EdgeCluster& c : topology.clusters) {
    ClusterDispatch cd;
    for (const EdgeServer& s : c.servers) {
      cd.order.push_back(s.id);
      cd.servers[s.id] = ServerDispatch{&s, 0, 0};
    }
    std::sort(cd.order.begin(), cd.order.end());
    auto sit = schedules.find(c.id);
    if (sit != schedules.end()) cd.schedule = &sit->second;
    clusters[c.id] = std::move(cd);
  }

  CortState local_state;
  CortState& cort = cort_state ? *cort_state : local_state;
  if (strategy == Strategy::cort) {
    // Carried-over replicas keep occupying their cache budget.
    for (auto& [cluster, cd] : clusters) {
      for (auto& [sid, sd] : cd.servers) {
        auto it = cort.cached.find(sid);
        if (it == cort.cached.end()) continue;
        for (const StreamKey& s : it->second) {
          sd.cache_used += segment_set_size(s.bitrate, snapshot.window);
        }
      }
    }
  }

  for (const auto& [key, count] : snapshot.counts) {
    if (count <= 0) continue;
    DispatchCell& cell = out.cells[key];
    const Kbps b = key.stream.bitrate;
    const Kb unit_kb = segment_set_size(b, snapshot.window);

    auto ait = allocation.assigned.find(key.group);
    if (ait == allocation.assigned.end() || !clusters.count(ait->second)) {
      cell.origin += count;
      cell.origin_kb += count * unit_kb;
      out.origin_kb += count * unit_kb;
      continue;
    }
    ClusterDispatch& cd = clusters[ait->second];

    if (strategy == Strategy::cort) {
      for (std::int64_t u = 0; u < count; ++u) {
        // Edge hit on any server already holding the stream, id order.
        bool served = false;
        for (const ServerId& sid : cd.order) {
          ServerDispatch& sd = cd.servers[sid];
          if (!cort.cached[sid].count(key.stream)) continue;
          if (sd.consumed + b > sd.server->bandwidth) continue;
          serve_edge(out, cell, sd, sid, b, unit_kb);
          served = true;
          break;
        }
        if (served) continue;

        // Miss: this unit fetches from the origin and triggers an install on
        // the server with the most residual bandwidth that can hold the
        // stream (cache budget and one viewer's bandwidth).
        const ServerId* target = nullptr;
        Kbps best_residual = -1;
        for (const ServerId& sid : cd.order) {
          ServerDispatch& sd = cd.servers[sid];
          if (cort.cached[sid].count(key.stream)) continue;
          const Kb budget = usable_cache(sd.server->cache, alpha);
          if (sd.cache_used + unit_kb > budget) continue;
          const Kbps residual = sd.server->bandwidth - sd.consumed;
          if (residual < b) continue;
          if (residual > best_residual) {
            best_residual = residual;
            target = &sid;
          }
        }
        if (target != nullptr) {
          ServerDispatch& sd = cd.servers[*target];
          sd.cache_used += unit_kb;
          cort.cached[*target].insert(key.stream);
          if (cort_options.segment_granular) {
            // Only the first segment misses; the unit is edge-served for the
            // rest of the window and consumes bandwidth.
            const Kb miss_kb =
                std::min<Kb>(unit_kb, b * cort_options.segment_length);
            sd.consumed += b;
            out.consumed_bandwidth[*target] += b;
            cell.edge += 1;
            cell.edge_kb += unit_kb - miss_kb;
            cell.origin_kb += miss_kb;
            out.edge_kb += unit_kb - miss_kb;
            out.origin_kb += miss_kb;
            if (std::find(cell.servers.begin(), cell.servers.end(), *target) ==
                cell.servers.end()) {
              cell.servers.push_back(*target);
            }
            continue;
          }
        }
        cell.origin += 1;
        cell.origin_kb += unit_kb;
        out.origin_kb += unit_kb;
      }
      continue;
    }

    // PLVER / ABR: replay against the planned schedule. Planned placement
    // order first, then id order over caching servers.
    std::vector<ServerId> try_order;
    if (cd.schedule != nullptr) {
      auto pit = cd.schedule->assignments.find(key);
      if (pit != cd.schedule->assignments.end()) {
        for (const auto& [sid, planned] : pit->second) {
          if (std::find(try_order.begin(), try_order.end(), sid) == try_order.end()) {
            try_order.push_back(sid);
          }
        }
      }
      for (const ServerId& sid : cd.order) {
        auto cit = cd.schedule->cached.find(sid);
        if (cit == cd.schedule->cached.end() || !cit->second.count(key.stream)) {
          continue;
        }
        if (std::find(try_order.begin(), try_order.end(), sid) == try_order.end()) {
          try_order.push_back(sid);
        }
      }
    }
    std::int64_t remaining = count;
    for (const ServerId& sid : try_order) {
      if (remaining == 0) break;
      ServerDispatch& sd = cd.servers[sid];
      const Kbps residual = sd.server->bandwidth - sd.consumed;
      const std::int64_t fits = std::min<std::int64_t>(remaining, residual / b);
      for (std::int64_t u = 0; u < fits; ++u) serve_edge(out, cell, sd, sid, b, unit_kb);
      remaining -= fits;
    }
    cell.origin += remaining;
    cell.origin_kb += remaining * unit_kb;
    out.origin_kb += remaining * unit_kb;
  }

  return out;
}

double offloading_ratio(const DispatchOutcome& outcome) {
  const Kb total = outcome.edge_kb + outcome.origin_kb;
  if (total == 0) return 1.0;
  return static_cast<double>(outcome.edge_kb) / static_cast<double>(total);
}

std::map<Kbps, double> satisfaction_by_bitrate(const DispatchOutcome& outcome) {
  std::map<Kbps, std::pair<std::int64_t, std::int64_t>> tally;  // edge, total
  for (const auto& [key, cell] : outcome.cells) {
    auto& [edge, total] = tally[key.stream.bitrate];
    edge += cell.edge;
    total += cell.edge + cell.origin;
  }
  std::map<Kbps, double> out;
  for (const auto& [tier, counts] : tally) {
    if (counts.second > 0) {
      out[tier] = static_cast<double>(counts.first) /
                  static_cast<double>(counts.second);
    }
  }
  return out;
}

WindowMetrics window_metrics(const DispatchOutcome& outcome,
                             const Allocation& allocation, double alpha,
                             double fluctuation) {
  WindowMetrics m;
  m.window_start = outcome.window.start;
  m.strategy = outcome.strategy;
  m.alpha = alpha;
  m.fluctuation = fluctuation;
  m.edge_kb = outcome.edge_kb;
  m.origin_kb = outcome.origin_kb;
  m.degenerate = (outcome.edge_kb + outcome.origin_kb) == 0;
  m.offloading = offloading_ratio(outcome);
  m.per_bitrate_satisfaction = satisfaction_by_bitrate(outcome);

  std::map<ClusterId, std::pair<Kb, Kb>> per_cluster;  // edge, total
  for (const auto& [key, cell] : outcome.cells) {
    auto ait = allocation.assigned.find(key.group);
    if (ait == allocation.assigned.end()) continue;
    auto& [edge, total] = per_cluster[ait->second];
    edge += cell.edge_kb;
    total += cell.edge_kb + cell.origin_kb;
  }
  for (const auto& [cluster, kb] : per_cluster) {
    m.per_cluster_offloading[cluster] =
        kb.second == 0 ? 1.0
                       : static_cast<double>(kb.first) / static_cast<double>(kb.second);
  }
  return m;
}

void validate_outcome(const DispatchOutcome& outcome,
                      const ViewershipSnapshot& snapshot,
                      const Topology& topology) {
  Kb edge_kb = 0;
  Kb origin_kb = 0;
  for (const auto& [key, count] : snapshot.counts) {
    if (count <= 0) continue;
    auto it = outcome.cells.find(key);
    if (it == outcome.cells.end()) {
      throw DataError("outcome: demand cell missing for group " + key.group);
    }
    const DispatchCell& cell = it->second;
    if (cell.edge + cell.origin != count) {
      throw DataError("outcome: edge + origin != demand for group " + key.group);
    }
    const Kb total_kb = count * segment_set_size(key.stream.bitrate, snapshot.window);
    if (cell.edge_kb + cell.origin_kb != total_kb) {
      throw DataError("outcome: traffic not conserved for group " + key.group);
    }
    edge_kb += cell.edge_kb;
    origin_kb += cell.origin_kb;
  }
  if (edge_kb != outcome.edge_kb || origin_kb != outcome.origin_kb) {
    throw DataError("outcome: totals disagree with per-cell sums");
  }
  for (const EdgeCluster& c : topology.clusters) {
    for (const EdgeServer& s : c.servers) {
      auto it = outcome.consumed_bandwidth.find(s.id);
      if (it != outcome.consumed_bandwidth.end() && it->second > s.bandwidth) {
        throw DataError("outcome: bandwidth exceeded on server " + s.id);
      }
    }
  }
}

}  // namespace plver
