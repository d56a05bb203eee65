#include "plver/cli.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "plver/allocation.hpp"
#include "plver/errors.hpp"
#include "plver/experiment.hpp"
#include "plver/report.hpp"
#include "plver/rng.hpp"

namespace plver {

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  std::cout << "wrote " << path.string() << "\n";
}

/// Label-based levels when the topology's labels explain every assignment;
/// otherwise fall back to uP positions (micro topologies without geo labels).
LevelFn pick_level_fn(const Topology& topology,
                      const std::vector<const Allocation*>& allocations) {
  LevelFn by_label = make_label_level_fn(topology);
  for (const Allocation* allocation : allocations) {
    for (const auto& [gid, cid] : allocation->assigned) {
      if (by_label(gid, cid) == 0) {
        std::cerr << "allocate: assigned pair (" << gid << ", " << cid
                  << ") matches no geo level; using uP positions instead\n";
        return make_positional_level_fn(topology.prefs);
      }
    }
  }
  return by_label;
}

std::string comparison_csv(const RankHistogram& greedy, const RankHistogram& isoa) {
  std::ostringstream out;
  out << "level,greedy,isoa,change\n";
  for (int level = 1; level <= 6; ++level) {
    out << "Lv." << level << "," << greedy.counts[level] << "," << isoa.counts[level]
        << "," << (isoa.counts[level] - greedy.counts[level]) << "\n";
  }
  out << "unallocated," << greedy.unallocated << "," << isoa.unallocated << ","
      << (isoa.unallocated - greedy.unallocated) << "\n";
  return out.str();
}

struct GridCell {
  Strategy strategy;
  double alpha;
  double fluctuation;
};

}  // namespace

Topology resolve_topology(const ExperimentConfig& config,
                          const Trace* trace_for_sizing) {
  if (!config.topology.file.empty()) {
    return load_topology(config.topology.file);
  }
  if (!config.topology.synth.has_value()) {
    throw ConfigError("config: topology: needs file or synth");
  }
  SynthTopologyParams params = *config.topology.synth;
  params.window_length = config.window_s;
  if (config.seed) params.seed = *config.seed;
  if (params.target_demand <= 0) {
    if (trace_for_sizing == nullptr || trace_for_sizing->windows.empty()) {
      throw ConfigError(
          "config: topology.synth.target_demand_mbps: missing and no trace to "
          "derive it from");
    }
    params.target_demand = mean_window_demand(*trace_for_sizing);
  }
  return synthesize_topology(params);
}

Trace resolve_trace(const ExperimentConfig& config) {
  if (!config.trace.file.empty()) {
    std::vector<TraceWarning> warnings;
    Trace trace = load_trace(config.trace.file, config.window_s, &warnings);
    for (const TraceWarning& w : warnings) {
      std::cerr << "trace: line " << w.line << ": " << w.message << "\n";
    }
    return trace;
  }
  if (!config.trace.synth.has_value()) {
    throw ConfigError("config: trace: needs file or synth");
  }
  SynthTraceParams params = *config.trace.synth;
  params.window_length = config.window_s;
  if (config.seed) params.seed = Rng::derive(*config.seed, 1);
  return synthesize_trace(params);
}

void cmd_allocate(const ExperimentConfig& config) {
  validate_config(config);

  Trace trace;
  const Trace* sizing = nullptr;
  const bool need_trace = config.topology.file.empty() &&
                          config.topology.synth.has_value() &&
                          config.topology.synth->target_demand <= 0;
  if (need_trace) {
    trace = resolve_trace(config);
    sizing = &trace;
  }
  const Topology topology = resolve_topology(config, sizing);

  const Allocation isoa =
      isoa_allocate(topology.groups, topology.clusters, topology.prefs);
  const Allocation greedy =
      greedy_allocate(topology.groups, topology.clusters, topology.prefs);

  const StabilityResult stability =
      is_stable(isoa, topology.groups, topology.clusters, topology.prefs);
  if (!stability.stable) {
    std::cerr << "allocate: ISOA result has a blocking pair ("
              << stability.blocking->first << ", " << stability.blocking->second
              << ")\n";
  }

  const LevelFn level_of = pick_level_fn(topology, {&isoa, &greedy});
  const RankHistogram isoa_hist =
      preference_rank_histogram(isoa, topology.groups, level_of);
  const RankHistogram greedy_hist =
      preference_rank_histogram(greedy, topology.groups, level_of);

  const fs::path out(config.out);
  write_text(out / "isoa_allocation.json", allocation_to_json(isoa, topology.groups));
  write_text(out / "greedy_allocation.json",
             allocation_to_json(greedy, topology.groups));
  write_text(out / "isoa_histogram.csv", histogram_to_csv(isoa_hist));
  write_text(out / "greedy_histogram.csv", histogram_to_csv(greedy_hist));
  write_text(out / "rank_comparison.csv", comparison_csv(greedy_hist, isoa_hist));
}

void cmd_simulate(const ExperimentConfig& config) {
  validate_config(config);

  const Trace trace = resolve_trace(config);
  if (trace.windows.empty()) throw DataError("simulate: trace has no windows");
  const Topology topology = resolve_topology(config, &trace);

  const Allocation allocation =
      isoa_allocate(topology.groups, topology.clusters, topology.prefs);

  ExperimentOptions options;
  options.seed = config.seed.value_or(0);
  options.next_window_dispatch = config.next_window_dispatch;
  options.carry_over = config.carry_over;
  options.cort_segment_granular = config.cort_segment_granular;
  options.segment_length = config.segment_s;

  std::vector<GridCell> cells;
  for (const std::string& name : config.strategies) {
    const Strategy strategy = parse_strategy(name);
    for (double alpha : config.alphas) {
      for (double f : config.fluctuations) {
        cells.push_back(GridCell{strategy, alpha, f});
      }
    }
  }

  // Cells are independent; workers pull from a shared index and results land
  // in per-cell slots, so output bytes do not depend on the worker count.
  std::vector<std::vector<WindowMetrics>> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers =
      std::min<std::size_t>(cells.size(),
                            config.jobs > 0 ? static_cast<unsigned>(config.jobs) : hw);
  auto work = [&]() {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      try {
        results[i] = run_experiment(topology, trace, allocation, cells[i].strategy,
                                    cells[i].alpha, cells[i].fluctuation, options);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failure = e.what();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  if (failed.load()) throw DataError("simulate: " + failure);

  std::string metrics = metrics_csv_header();
  std::string per_cluster = per_cluster_csv_header();
  nlohmann::json summary_cells = nlohmann::json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (const WindowMetrics& m : results[i]) metrics += metrics_csv_row(m);
    const std::string block = per_cluster_csv(results[i]);
    per_cluster += block.substr(per_cluster_csv_header().size());
    summary_cells.push_back(
        nlohmann::json{{"strategy", strategy_name(cells[i].strategy)},
                       {"alpha", cells[i].alpha},
                       {"fluctuation", cells[i].fluctuation},
                       {"mean_offloading", mean_offloading(results[i])},
                       {"windows", results[i].size()}});
  }
  nlohmann::json summary{{"cells", summary_cells},
                         {"seed", config.seed.value_or(0)},
                         {"window_s", config.window_s}};

  const fs::path out(config.out);
  write_text(out / "allocation.json", allocation_to_json(allocation, topology.groups));
  write_text(out / "metrics.csv", metrics);
  write_text(out / "per_cluster.csv", per_cluster);
  write_text(out / "summary.json", summary.dump(2) + "\n");
}

void cmd_report(const std::string& metrics_dir, const std::string& out_dir) {
  const std::vector<std::string> written = write_report(metrics_dir, out_dir);
  for (const std::string& path : written) std::cout << "wrote " << path << "\n";
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"PLVER: stable edge allocation and proactive live-video replication"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::optional<std::uint64_t> seed_override;
  std::vector<double> alpha_override;
  std::vector<std::string> strategy_override;
  std::vector<double> fluctuation_override;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config JSON")->required();
    cmd->add_option("--seed", seed_override, "override config seed");
    cmd->add_option("--alpha", alpha_override, "override alpha list");
    cmd->add_option("--strategy", strategy_override, "override strategy list");
    cmd->add_option("--fluctuation", fluctuation_override, "override fluctuations");
    cmd->add_option("--out", out_override, "override output directory");
  };

  CLI::App* allocate = app.add_subcommand("allocate", "run ISOA and greedy allocation");
  add_common(allocate);
  CLI::App* simulate = app.add_subcommand("simulate", "run the experiment grid");
  add_common(simulate);

  std::string metrics_dir;
  std::string report_out;
  CLI::App* report = app.add_subcommand("report", "render SVG charts from metrics");
  report->add_option("--metrics", metrics_dir, "directory with metrics.csv")
      ->required();
  report->add_option("--out", report_out, "chart output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (report->parsed()) {
      cmd_report(metrics_dir,
                 report_out.empty() ? metrics_dir + "/charts" : report_out);
      return 0;
    }
    ExperimentConfig config = load_config(config_path);
    if (seed_override) config.seed = *seed_override;
    if (!alpha_override.empty()) config.alphas = alpha_override;
    if (!strategy_override.empty()) config.strategies = strategy_override;
    if (!fluctuation_override.empty()) config.fluctuations = fluctuation_override;
    if (!out_override.empty()) config.out = out_override;
    // Seed overrides reach the synth sources the same way load_config does.
    if (seed_override) {
      if (config.topology.synth) config.topology.synth->seed = *config.seed;
      if (config.trace.synth) config.trace.synth->seed = Rng::derive(*config.seed, 1);
    }

    if (allocate->parsed()) {
      cmd_allocate(config);
    } else {
      cmd_simulate(config);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace plver
