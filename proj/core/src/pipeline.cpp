#include "rttslam/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "rttslam/errors.hpp"

namespace rttslam {

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kImuOnly:
      return "imu_only";
    case RunMode::kTraditionalSlam:
      return "traditional_slam";
    case RunMode::kRobustSlam:
      return "robust_slam";
  }
  return "unknown";
}

RunMode parse_run_mode(const std::string& text) {
  if (text == "imu_only") {
    return RunMode::kImuOnly;
  }
  if (text == "traditional_slam") {
    return RunMode::kTraditionalSlam;
  }
  if (text == "robust_slam") {
    return RunMode::kRobustSlam;
  }
  throw ConfigError("unknown mode '" + text +
                    "' (expected imu_only, traditional_slam or robust_slam)");
}

namespace {

std::vector<double> node_times_of(const Trajectory& trajectory) {
  std::vector<double> times;
  times.reserve(trajectory.size());
  for (const TimedPose& p : trajectory) {
    times.push_back(p.t);
  }
  return times;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config,
                            const std::vector<StepEvent>& steps,
                            const std::vector<RttObservation>& observations,
                            const std::optional<Trajectory>& ground_truth,
                            const std::vector<NodeLoopPair>& extra_loop_pairs) {
  validate_steps(steps);
  if (steps.empty()) {
    throw InputError("pipeline: no steps to process");
  }

  PipelineResult result;
  result.steps = steps;
  const Pose2 origin =
      ground_truth && !ground_truth->empty() ? ground_truth->front().pose
                                             : Pose2{};
  const Trajectory dead_reckoned = pdr_trajectory(steps, origin);

  if (config.mode == RunMode::kImuOnly) {
    result.estimate = dead_reckoned;
  } else {
    std::vector<NodeLoopPair> pairs;
    if (!observations.empty()) {
      const std::vector<LoopClosureCandidate> candidates =
          detect_loop_closures(observations, config.cluster);
      std::vector<double> obs_times;
      obs_times.reserve(observations.size());
      for (const RttObservation& o : observations) {
        obs_times.push_back(o.t);
      }
      pairs = attach_to_nodes(candidates, obs_times,
                              node_times_of(dead_reckoned));
    }
    pairs.insert(pairs.end(), extra_loop_pairs.begin(),
                 extra_loop_pairs.end());
    std::sort(pairs.begin(), pairs.end(),
              [](const NodeLoopPair& a, const NodeLoopPair& b) {
                return std::tie(a.node_i, a.node_k) <
                       std::tie(b.node_i, b.node_k);
              });

    const PoseGraph graph =
        build_graph(steps, pairs, config.noise, origin);
    SolverConfig solver = config.solver;
    solver.robust_enabled = config.mode == RunMode::kRobustSlam;
    SolveResult solved = optimize(graph, solver);

    result.estimate.reserve(dead_reckoned.size());
    for (std::size_t i = 0; i < dead_reckoned.size(); ++i) {
      result.estimate.push_back(
          {dead_reckoned[i].t, solved.graph.nodes[i]});
    }
    result.loop_report.reserve(pairs.size());
    for (std::size_t i = 0; i < solved.graph.loop_edges.size(); ++i) {
      const LoopEdge& e = solved.graph.loop_edges[i];
      result.loop_report.push_back(
          {e.node_i, e.node_k, e.rtt_distance,
           solved.report.loop_scaling[i]});
    }
    result.solve = std::move(solved.report);
  }

  if (ground_truth && !ground_truth->empty()) {
    result.metrics = evaluate_trajectory(result.estimate, *ground_truth);
  }
  return result;
}

PipelineResult run_pipeline_files(const PipelineConfig& config) {
  const bool slam = config.mode != RunMode::kImuOnly;

  std::vector<StepEvent> steps;
  bool steps_from_pdr = false;
  if (!config.imu_log.empty()) {
    const std::vector<ImuSample> imu = io::parse_imu_log(config.imu_log);
    const PdrResult pdr = run_pdr(imu, config.pdr);
    steps = pdr.steps;
    steps_from_pdr = true;
  } else if (!config.step_log.empty()) {
    steps = io::parse_step_log(config.step_log);
  } else {
    throw InputError("pipeline: neither an IMU log nor a step log was given");
  }

  std::vector<RttObservation> observations;
  if (slam) {
    if (config.rtt_log.empty()) {
      throw InputError("pipeline: mode " + to_string(config.mode) +
                       " requires an RTT log");
    }
    if (!std::filesystem::exists(config.rtt_log)) {
      throw InputError("pipeline: RTT log not found: " +
                       config.rtt_log.string());
    }
    observations = io::parse_rtt_log(config.rtt_log);
  }

  std::optional<Trajectory> ground_truth;
  if (!config.ground_truth.empty()) {
    ground_truth = io::parse_trajectory(config.ground_truth);
  }

  PipelineResult result =
      run_pipeline(config, steps, observations, ground_truth);

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) {
    throw InputError("pipeline: cannot create output directory " +
                     config.output_dir.string());
  }
  io::write_trajectory(config.output_dir / "trajectory.csv", result.estimate);
  if (steps_from_pdr) {
    io::write_step_log(config.output_dir / "steps.csv", result.steps);
  }
  if (slam) {
    io::write_loop_report(config.output_dir / "loops.csv",
                          result.loop_report);
    io::write_solve_report(config.output_dir / "solve_report.txt",
                           *result.solve);
  }
  if (result.metrics) {
    io::write_metrics(config.output_dir / "metrics.csv", *result.metrics);
    io::write_cdf(config.output_dir / "cdf.csv", *result.metrics);
  }
  return result;
}

SimulateSummary run_simulate_files(const SimConfig& sim, const PdrConfig& pdr,
                                   const std::filesystem::path& output_dir) {
  const SimOutput out = generate_walk(sim);

  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) {
    throw InputError("simulate: cannot create output directory " +
                     output_dir.string());
  }
  io::write_trajectory(output_dir / "gt.csv", out.ground_truth);
  io::write_step_log(output_dir / "steps.csv", out.noisy_steps);
  io::write_imu_log(output_dir / "imu.csv", synth_imu(out.noisy_steps, pdr));
  io::write_rtt_log(output_dir / "rtt.csv", out.rtt_observations);

  SimulateSummary summary;
  summary.step_count = static_cast<int>(out.noisy_steps.size());
  for (std::size_t i = 1; i < out.ground_truth.size(); ++i) {
    summary.path_length_m +=
        std::hypot(out.ground_truth[i].pose.x - out.ground_truth[i - 1].pose.x,
                   out.ground_truth[i].pose.y - out.ground_truth[i - 1].pose.y);
  }
  summary.duration_s =
      out.ground_truth.back().t - out.ground_truth.front().t;
  summary.observation_count = static_cast<int>(out.rtt_observations.size());
  return summary;
}

}  // namespace rttslam
