// Command-line front end: simulate / pdr / slam / eval / pipeline.
// Exit status: 0 success, 2 configuration error, 3 input or parse
// error, 4 solver failure.

#include <CLI11.hpp>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rttslam/errors.hpp"
#include "rttslam/io.hpp"
#include "rttslam/pipeline.hpp"
#include "svg_export.hpp"

namespace {

using namespace rttslam;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string mode;
  std::string imu, steps, rtt, gt;
  std::string svg;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool dump_graph = false;
};

std::vector<std::pair<std::string, std::string>> split_overrides(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--set expects key.path=value, got '" + item + "'");
    }
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

PipelineConfig make_config(const CommonArgs& args) {
  PipelineConfig cfg =
      load_config(args.config_path.empty()
                      ? std::filesystem::path{}
                      : std::filesystem::path(args.config_path),
                  split_overrides(args.overrides));
  if (!args.mode.empty()) {
    cfg.mode = parse_run_mode(args.mode);
  }
  if (!args.imu.empty()) {
    cfg.imu_log = args.imu;
  }
  if (!args.steps.empty()) {
    cfg.step_log = args.steps;
  }
  if (!args.rtt.empty()) {
    cfg.rtt_log = args.rtt;
  }
  if (!args.gt.empty()) {
    cfg.ground_truth = args.gt;
  }
  if (!args.out_dir.empty()) {
    cfg.output_dir = args.out_dir;
  }
  if (args.seed_set) {
    cfg.sim.seed = args.seed;
  }
  return cfg;
}

void add_common_flags(CLI::App* sub, CommonArgs& args, bool with_seed) {
  sub->add_option("--config", args.config_path, "YAML configuration file");
  sub->add_option("--set", args.overrides,
                  "Override a config key, e.g. --set sim.laps=3");
  sub->add_option("--out", args.out_dir, "Output directory");
  if (with_seed) {
    sub->add_option("--seed", args.seed, "Simulator seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
  }
}

void maybe_write_svg(const CommonArgs& args, const PipelineConfig& cfg,
                     const Trajectory* estimate, const Trajectory* truth) {
  if (args.svg.empty()) {
    return;
  }
  std::vector<tools::SvgLayer> layers;
  if (truth != nullptr) {
    layers.push_back({"ground truth", "black", truth});
  }
  if (estimate != nullptr) {
    layers.push_back({"estimate", "steelblue", estimate});
  }
  tools::write_svg(args.svg, layers, cfg.sim.ap_positions);
}

int run_simulate(const CommonArgs& args) {
  const PipelineConfig cfg = make_config(args);
  const SimulateSummary summary =
      run_simulate_files(cfg.sim, cfg.pdr, cfg.output_dir);
  std::cout << "simulate: " << summary.step_count << " steps, "
            << summary.path_length_m << " m path, " << summary.duration_s
            << " s, " << summary.observation_count << " rtt observations -> "
            << cfg.output_dir.string() << '\n';
  if (!args.svg.empty()) {
    const Trajectory gt =
        io::parse_trajectory(cfg.output_dir / "gt.csv");
    maybe_write_svg(args, cfg, nullptr, &gt);
  }
  return 0;
}

int run_pdr_cmd(const CommonArgs& args) {
  PipelineConfig cfg = make_config(args);
  if (cfg.imu_log.empty()) {
    throw InputError("pdr: an IMU log is required (--imu)");
  }
  cfg.mode = RunMode::kImuOnly;
  const PipelineResult res = run_pipeline_files(cfg);
  std::cout << "pdr: " << res.steps.size() << " steps -> "
            << cfg.output_dir.string() << '\n';
  return 0;
}

int run_slam(const CommonArgs& args, bool full_pipeline) {
  PipelineConfig cfg = make_config(args);
  if (!full_pipeline) {
    if (cfg.step_log.empty()) {
      throw InputError("slam: a step log is required (--steps)");
    }
    cfg.imu_log.clear();  // the slam subcommand starts from detected steps
  }
  const PipelineResult res = run_pipeline_files(cfg);

  if (args.dump_graph && res.solve) {
    // Re-create the initial graph for inspection.
    const Pose2 origin = cfg.ground_truth.empty()
                             ? Pose2{}
                             : io::parse_trajectory(cfg.ground_truth)
                                   .front()
                                   .pose;
    std::vector<NodeLoopPair> pairs;
    for (const auto& row : res.loop_report) {
      pairs.push_back({row.node_i, row.node_k, row.d_rtt_m});
    }
    const PoseGraph graph = build_graph(res.steps, pairs, cfg.noise, origin);
    std::ofstream os(cfg.output_dir / "graph.g2o", std::ios::binary);
    write_graph(os, graph);
  }

  std::cout << to_string(cfg.mode) << ": " << res.steps.size() << " steps, "
            << res.loop_report.size() << " loop edges";
  if (res.solve) {
    std::cout << ", cost " << res.solve->initial_cost << " -> "
              << res.solve->final_cost << " in " << res.solve->iterations_used
              << " iterations";
  }
  if (res.metrics) {
    std::cout << ", rmse " << res.metrics->rmse << " m, endpoint "
              << res.metrics->endpoint_error << " m, p90 "
              << res.metrics->percentile_90 << " m";
  }
  std::cout << " -> " << cfg.output_dir.string() << '\n';

  std::optional<Trajectory> truth;
  if (!cfg.ground_truth.empty()) {
    truth = io::parse_trajectory(cfg.ground_truth);
  }
  maybe_write_svg(args, cfg, &res.estimate, truth ? &*truth : nullptr);
  return 0;
}

int run_eval(const CommonArgs& args) {
  const PipelineConfig cfg = make_config(args);
  const Trajectory estimate = io::parse_trajectory(args.steps);
  const Trajectory truth = io::parse_trajectory(cfg.ground_truth);
  const MetricsReport report = evaluate_trajectory(estimate, truth);

  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  io::write_metrics(cfg.output_dir / "metrics.csv", report);
  io::write_cdf(cfg.output_dir / "cdf.csv", report);
  std::cout << "eval: rmse " << report.rmse << " m, endpoint "
            << report.endpoint_error << " m, p90 " << report.percentile_90
            << " m -> " << cfg.output_dir.string() << '\n';
  maybe_write_svg(args, cfg, &estimate, &truth);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Indoor localisation toolkit: step dead reckoning, WiFi "
      "round-trip-time loop closure, and robust pose-graph optimization"};
  app.require_subcommand(1);

  CommonArgs sim_args, pdr_args, slam_args, eval_args, pipe_args;

  CLI::App* sim = app.add_subcommand(
      "simulate", "Generate a synthetic walk with IMU and RTT logs");
  add_common_flags(sim, sim_args, true);
  sim->add_option("--svg", sim_args.svg, "Render the true path to an SVG");

  CLI::App* pdr = app.add_subcommand(
      "pdr", "Detect steps in an IMU log and dead-reckon a trajectory");
  add_common_flags(pdr, pdr_args, false);
  pdr->add_option("--imu", pdr_args.imu, "IMU log (CSV)")->required();

  CLI::App* slam = app.add_subcommand(
      "slam", "Optimize a step log against RTT loop closures");
  add_common_flags(slam, slam_args, false);
  slam->add_option("--steps", slam_args.steps, "Step log (CSV)")->required();
  slam->add_option("--rtt", slam_args.rtt, "RTT log (CSV)");
  slam->add_option("--gt", slam_args.gt, "Ground-truth trajectory (CSV)");
  slam->add_option("--mode", slam_args.mode,
                   "imu_only | traditional_slam | robust_slam");
  slam->add_flag("--dump-graph", slam_args.dump_graph,
                 "Write the initial pose graph as graph.g2o");
  slam->add_option("--svg", slam_args.svg, "Render trajectories to an SVG");

  CLI::App* eval = app.add_subcommand(
      "eval", "Compare an estimated trajectory against ground truth");
  add_common_flags(eval, eval_args, false);
  eval->add_option("--estimate", eval_args.steps, "Estimated trajectory (CSV)")
      ->required();
  eval->add_option("--gt", eval_args.gt, "Ground-truth trajectory (CSV)")
      ->required();
  eval->add_option("--svg", eval_args.svg, "Render trajectories to an SVG");

  CLI::App* pipe = app.add_subcommand(
      "pipeline", "Full run: ingest logs, close loops, optimize, evaluate");
  add_common_flags(pipe, pipe_args, false);
  pipe->add_option("--imu", pipe_args.imu, "IMU log (CSV)");
  pipe->add_option("--steps", pipe_args.steps, "Step log (CSV)");
  pipe->add_option("--rtt", pipe_args.rtt, "RTT log (CSV)");
  pipe->add_option("--gt", pipe_args.gt, "Ground-truth trajectory (CSV)");
  pipe->add_option("--mode", pipe_args.mode,
                   "imu_only | traditional_slam | robust_slam");
  pipe->add_flag("--dump-graph", pipe_args.dump_graph,
                 "Write the initial pose graph as graph.g2o");
  pipe->add_option("--svg", pipe_args.svg, "Render trajectories to an SVG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      return run_simulate(sim_args);
    }
    if (pdr->parsed()) {
      return run_pdr_cmd(pdr_args);
    }
    if (slam->parsed()) {
      return run_slam(slam_args, false);
    }
    if (eval->parsed()) {
      return run_eval(eval_args);
    }
    if (pipe->parsed()) {
      return run_slam(pipe_args, true);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
