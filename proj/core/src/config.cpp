#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rttslam/errors.hpp"
#include "rttslam/pipeline.hpp"

namespace rttslam {

namespace {

void check_keys(const YAML::Node& node,
                std::initializer_list<const char*> allowed,
                const std::string& section) {
  if (!node) {
    return;
  }
  if (!node.IsMap()) {
    throw ConfigError("config section '" + section + "' must be a map");
  }
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown config key '" + section + "." + key + "'");
    }
  }
}

template <typename T>
void read_key(const YAML::Node& node, const char* key, const std::string& section,
          T& out) {
  if (!node || !node[key]) {
    return;
  }
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config key '" + section + "." + key +
                      "' has the wrong type");
  }
}

void read_path_key(const YAML::Node& node, const char* key,
               const std::string& section, std::filesystem::path& out) {
  std::string text;
  read_key(node, key, section, text);
  if (!text.empty()) {
    out = text;
  }
}

void apply_override(YAML::Node root, const std::string& dotted,
                    const std::string& value) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    if (dot == std::string::npos) {
      parts.push_back(dotted.substr(start));
      break;
    }
    parts.push_back(dotted.substr(start, dot - start));
    start = dot + 1;
  }
  YAML::Node node = root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node child = node[parts[i]];
    node.reset(child);
  }
  try {
    node[parts.back()] = YAML::Load(value);
  } catch (const YAML::Exception&) {
    throw ConfigError("cannot parse override value '" + value + "' for '" +
                      dotted + "'");
  }
}

}  // namespace

PipelineConfig load_config(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  YAML::Node root(YAML::NodeType::Map);
  if (!path.empty()) {
    if (!std::filesystem::exists(path)) {
      throw ConfigError("config file not found: " + path.string());
    }
    try {
      root = YAML::LoadFile(path.string());
    } catch (const YAML::Exception& e) {
      throw ConfigError("config file " + path.string() + ": " + e.what());
    }
  }
  for (const auto& [key, value] : overrides) {
    apply_override(root, key, value);
  }

  check_keys(root, {"mode", "paths", "pdr", "cluster", "graph", "solver",
                    "sim"},
             "config");

  PipelineConfig cfg;
  cfg.sim = SimConfig::home_scenario();

  if (root["mode"]) {
    std::string mode;
    read_key(root, "mode", "config", mode);
    cfg.mode = parse_run_mode(mode);
  }

  const YAML::Node paths = root["paths"];
  check_keys(paths, {"imu_log", "step_log", "rtt_log", "ground_truth",
                     "output_dir"},
             "paths");
  read_path_key(paths, "imu_log", "paths", cfg.imu_log);
  read_path_key(paths, "step_log", "paths", cfg.step_log);
  read_path_key(paths, "rtt_log", "paths", cfg.rtt_log);
  read_path_key(paths, "ground_truth", "paths", cfg.ground_truth);
  read_path_key(paths, "output_dir", "paths", cfg.output_dir);

  const YAML::Node pdr = root["pdr"];
  check_keys(pdr, {"window_samples", "stddev_threshold", "weinberg_h",
                   "lowpass_cutoff_hz", "min_step_duration_s"},
             "pdr");
  read_key(pdr, "window_samples", "pdr", cfg.pdr.window_samples);
  read_key(pdr, "stddev_threshold", "pdr", cfg.pdr.stddev_threshold);
  read_key(pdr, "weinberg_h", "pdr", cfg.pdr.weinberg_h);
  read_key(pdr, "lowpass_cutoff_hz", "pdr", cfg.pdr.lowpass_cutoff_hz);
  read_key(pdr, "min_step_duration_s", "pdr", cfg.pdr.min_step_duration_s);

  const YAML::Node cluster = root["cluster"];
  check_keys(cluster, {"distance_threshold_m", "min_common_aps",
                       "min_separation_s", "max_candidates_per_obs"},
             "cluster");
  read_key(cluster, "distance_threshold_m", "cluster",
       cfg.cluster.distance_threshold);
  read_key(cluster, "min_common_aps", "cluster", cfg.cluster.min_common_aps);
  read_key(cluster, "min_separation_s", "cluster", cfg.cluster.min_separation);
  read_key(cluster, "max_candidates_per_obs", "cluster",
       cfg.cluster.max_candidates_per_obs);

  const YAML::Node graph = root["graph"];
  check_keys(graph, {"odo_sigma_xy_per_m", "odo_sigma_xy_base_m",
                     "odo_sigma_theta_rad", "loop_sigma_m"},
             "graph");
  read_key(graph, "odo_sigma_xy_per_m", "graph", cfg.noise.odo_sigma_xy_per_m);
  read_key(graph, "odo_sigma_xy_base_m", "graph", cfg.noise.odo_sigma_xy_base);
  read_key(graph, "odo_sigma_theta_rad", "graph", cfg.noise.odo_sigma_theta);
  read_key(graph, "loop_sigma_m", "graph", cfg.noise.loop_sigma);

  const YAML::Node solver = root["solver"];
  check_keys(solver, {"free_parameter_c", "max_iterations",
                      "rel_cost_tolerance", "step_tolerance",
                      "initial_damping"},
             "solver");
  read_key(solver, "free_parameter_c", "solver", cfg.solver.free_parameter_c);
  read_key(solver, "max_iterations", "solver", cfg.solver.max_iterations);
  read_key(solver, "rel_cost_tolerance", "solver",
       cfg.solver.rel_cost_tolerance);
  read_key(solver, "step_tolerance", "solver", cfg.solver.step_tolerance);
  read_key(solver, "initial_damping", "solver", cfg.solver.initial_damping);

  const YAML::Node sim = root["sim"];
  check_keys(sim,
             {"waypoints", "laps", "nominal_step_length_m", "step_period_s",
              "step_length_noise_sigma_m", "heading_noise_sigma_rad",
              "heading_drift_rate_rad_per_step", "ap_positions",
              "rtt_noise_sigma_m", "rtt_outlier_prob", "rtt_outlier_bias_m",
              "rtt_rate_hz", "seed"},
             "sim");
  if (sim && sim["waypoints"]) {
    try {
      cfg.sim.waypoints.clear();
      for (const auto& wp : sim["waypoints"]) {
        cfg.sim.waypoints.emplace_back(wp[0].as<double>(),
                                       wp[1].as<double>());
      }
    } catch (const YAML::Exception&) {
      throw ConfigError("sim.waypoints must be a list of [x, y] pairs");
    }
  }
  if (sim && sim["ap_positions"]) {
    try {
      cfg.sim.ap_positions.clear();
      for (const auto& ap : sim["ap_positions"]) {
        cfg.sim.ap_positions.push_back({ap["id"].as<std::string>(),
                                        ap["x"].as<double>(),
                                        ap["y"].as<double>()});
      }
    } catch (const YAML::Exception&) {
      throw ConfigError(
          "sim.ap_positions must be a list of {id, x, y} entries");
    }
  }
  read_key(sim, "laps", "sim", cfg.sim.laps);
  read_key(sim, "nominal_step_length_m", "sim", cfg.sim.nominal_step_length);
  read_key(sim, "step_period_s", "sim", cfg.sim.step_period);
  read_key(sim, "step_length_noise_sigma_m", "sim",
       cfg.sim.step_length_noise_sigma);
  read_key(sim, "heading_noise_sigma_rad", "sim", cfg.sim.heading_noise_sigma);
  read_key(sim, "heading_drift_rate_rad_per_step", "sim",
       cfg.sim.heading_drift_rate);
  read_key(sim, "rtt_noise_sigma_m", "sim", cfg.sim.rtt_noise_sigma);
  read_key(sim, "rtt_outlier_prob", "sim", cfg.sim.rtt_outlier_prob);
  read_key(sim, "rtt_outlier_bias_m", "sim", cfg.sim.rtt_outlier_bias);
  read_key(sim, "rtt_rate_hz", "sim", cfg.sim.rtt_rate);
  read_key(sim, "seed", "sim", cfg.sim.seed);

  return cfg;
}

}  // namespace rttslam
