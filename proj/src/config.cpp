#include "plver/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "plver/errors.hpp"
#include "plver/rng.hpp"

namespace plver {

namespace {

using nlohmann::json;

SynthTopologyParams synth_topology_from_json(const json& j) {
  SynthTopologyParams p;
  p.group_count = j.value("groups", 0);
  p.cluster_count = j.value("clusters", 0);
  if (j.contains("bandwidth_classes_mbps")) {
    p.bandwidth_classes.clear();
    for (const auto& v : j.at("bandwidth_classes_mbps")) {
      p.bandwidth_classes.push_back(v.get<Kbps>() * 1000);
    }
  }
  p.target_demand = j.value("target_demand_mbps", Kbps{0}) * 1000;
  p.geo.states = j.value("states", p.geo.states);
  p.geo.counties_per_state = j.value("counties_per_state", p.geo.counties_per_state);
  p.geo.cities_per_county = j.value("cities_per_county", p.geo.cities_per_county);
  p.geo.isps = j.value("isps", p.geo.isps);
  return p;
}

json synth_topology_to_json(const SynthTopologyParams& p) {
  json classes = json::array();
  for (Kbps c : p.bandwidth_classes) classes.push_back(c / 1000);
  return json{{"groups", p.group_count},
              {"clusters", p.cluster_count},
              {"bandwidth_classes_mbps", classes},
              {"target_demand_mbps", p.target_demand / 1000},
              {"states", p.geo.states},
              {"counties_per_state", p.geo.counties_per_state},
              {"cities_per_county", p.geo.cities_per_county},
              {"isps", p.geo.isps}};
}

SynthTraceParams synth_trace_from_json(const json& j) {
  SynthTraceParams p;
  p.channels = j.value("channels", p.channels);
  p.zipf_exponent = j.value("zipf_exponent", p.zipf_exponent);
  p.viewers = j.value("viewers", p.viewers);
  p.windows = j.value("windows", p.windows);
  p.session_model = j.value("session_model", p.session_model);
  p.churn_online_prob = j.value("churn_online_prob", p.churn_online_prob);
  return p;
}

json synth_trace_to_json(const SynthTraceParams& p) {
  return json{{"channels", p.channels},
              {"zipf_exponent", p.zipf_exponent},
              {"viewers", p.viewers},
              {"windows", p.windows},
              {"session_model", p.session_model},
              {"churn_online_prob", p.churn_online_prob}};
}

}  // namespace

void validate_config(const ExperimentConfig& config) {
  if (!config.seed.has_value()) throw ConfigError("config: seed: missing");
  if (config.window_s <= 0) throw ConfigError("config: window_s: must be positive");
  if (config.segment_s <= 0) throw ConfigError("config: segment_s: must be positive");
  if (config.strategies.empty()) {
    throw ConfigError("config: strategies: at least one required");
  }
  for (const std::string& s : config.strategies) {
    if (s != "plver" && s != "abr" && s != "cort") {
      throw ConfigError("config: strategies: unknown strategy " + s);
    }
  }
  if (config.alphas.empty()) throw ConfigError("config: alphas: at least one required");
  for (double a : config.alphas) {
    if (!(a > 0.0) || a > 1.0) {
      throw ConfigError("config: alphas: values must lie in (0, 1]");
    }
  }
  for (double f : config.fluctuations) {
    if (f < 0.0 || f > 1.0) {
      throw ConfigError("config: fluctuations: values must lie in [0, 1]");
    }
  }
  if (config.topology.file.empty() && !config.topology.synth.has_value()) {
    throw ConfigError("config: topology: needs file or synth");
  }
  if (config.topology.synth.has_value() && config.topology.file.empty()) {
    const auto& p = *config.topology.synth;
    if (p.group_count < 1) throw ConfigError("config: topology.synth.groups: must be >= 1");
    if (p.cluster_count < 1) {
      throw ConfigError("config: topology.synth.clusters: must be >= 1");
    }
    if (p.bandwidth_classes.empty()) {
      throw ConfigError("config: topology.synth.bandwidth_classes_mbps: empty");
    }
  }
  if (config.out.empty()) throw ConfigError("config: out: missing output directory");
  if (config.jobs < 0) throw ConfigError("config: jobs: must be >= 0");
}

ExperimentConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    c.window_s = doc.value("window_s", c.window_s);
    c.segment_s = doc.value("segment_s", c.segment_s);
    c.out = doc.value("out", c.out);
    if (doc.contains("strategies")) {
      c.strategies = doc.at("strategies").get<std::vector<std::string>>();
    }
    if (doc.contains("alphas")) {
      c.alphas = doc.at("alphas").get<std::vector<double>>();
    }
    if (doc.contains("fluctuations")) {
      c.fluctuations = doc.at("fluctuations").get<std::vector<double>>();
    }
    if (doc.contains("topology")) {
      const json& t = doc.at("topology");
      c.topology.file = t.value("file", "");
      if (t.contains("synth")) {
        c.topology.synth = synth_topology_from_json(t.at("synth"));
      }
    }
    if (doc.contains("trace")) {
      const json& t = doc.at("trace");
      c.trace.file = t.value("file", "");
      if (t.contains("synth")) c.trace.synth = synth_trace_from_json(t.at("synth"));
    }
    c.next_window_dispatch = doc.value("next_window_dispatch", false);
    c.carry_over = doc.value("carry_over", false);
    c.cort_segment_granular = doc.value("cort_segment_granular", false);
    c.jobs = doc.value("jobs", 0);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad document structure: ") + e.what());
  }

  // Synth params inherit the run's window length and seed.
  if (c.topology.synth) {
    c.topology.synth->window_length = c.window_s;
    if (c.seed) c.topology.synth->seed = *c.seed;
  }
  if (c.trace.synth) {
    c.trace.synth->window_length = c.window_s;
    if (c.seed) c.trace.synth->seed = Rng::derive(*c.seed, 1);
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json doc;
  if (c.seed) doc["seed"] = *c.seed;
  doc["window_s"] = c.window_s;
  doc["segment_s"] = c.segment_s;
  doc["out"] = c.out;
  doc["strategies"] = c.strategies;
  doc["alphas"] = c.alphas;
  doc["fluctuations"] = c.fluctuations;
  json topo = json::object();
  if (!c.topology.file.empty()) topo["file"] = c.topology.file;
  if (c.topology.synth) topo["synth"] = synth_topology_to_json(*c.topology.synth);
  doc["topology"] = topo;
  json trace = json::object();
  if (!c.trace.file.empty()) trace["file"] = c.trace.file;
  if (c.trace.synth) trace["synth"] = synth_trace_to_json(*c.trace.synth);
  doc["trace"] = trace;
  doc["next_window_dispatch"] = c.next_window_dispatch;
  doc["carry_over"] = c.carry_over;
  doc["cort_segment_granular"] = c.cort_segment_granular;
  doc["jobs"] = c.jobs;
  return doc.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

}  // namespace plver
