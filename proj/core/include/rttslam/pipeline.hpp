#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rttslam/io.hpp"
#include "rttslam/loop_closure.hpp"
#include "rttslam/metrics.hpp"
#include "rttslam/pdr.hpp"
#include "rttslam/pose_graph.hpp"
#include "rttslam/simulator.hpp"
#include "rttslam/solver.hpp"

namespace rttslam {

// The three-way comparison the toolkit exists to run: dead reckoning
// alone, equally weighted graph optimization, and the scaled variant.
enum class RunMode { kImuOnly, kTraditionalSlam, kRobustSlam };

std::string to_string(RunMode mode);
RunMode parse_run_mode(const std::string& text);  // throws ConfigError

struct PipelineConfig {
  RunMode mode = RunMode::kRobustSlam;
  PdrConfig pdr;
  ClusterConfig cluster;
  GraphNoiseModel noise;
  SolverConfig solver;  // robust_enabled is derived from mode at run time
  SimConfig sim;

  // Empty paths mean "not provided".
  std::filesystem::path imu_log;
  std::filesystem::path step_log;
  std::filesystem::path rtt_log;
  std::filesystem::path ground_truth;
  std::filesystem::path output_dir = ".";
};

// Loads the YAML config, applies dotted-key overrides (e.g.
// "sim.laps=3") on top, and binds it. Unknown keys are rejected. An
// empty path yields the built-in defaults plus overrides.
PipelineConfig load_config(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});

struct PipelineResult {
  std::vector<StepEvent> steps;
  Trajectory estimate;
  std::vector<io::LoopReportRow> loop_report;
  std::optional<SolveReport> solve;
  std::optional<MetricsReport> metrics;
};

// In-memory pipeline over already-loaded inputs: loop-closure
// detection on the observations, node attachment, graph construction
// and optimization per mode (skipped entirely for kImuOnly), metrics
// against the ground truth when given. extra_loop_pairs are appended
// to the detected ones before the graph is built, which is how
// controlled false positives enter ablation runs. The estimate is
// anchored at the ground truth's first pose when present.
PipelineResult run_pipeline(
    const PipelineConfig& config, const std::vector<StepEvent>& steps,
    const std::vector<RttObservation>& observations,
    const std::optional<Trajectory>& ground_truth,
    const std::vector<NodeLoopPair>& extra_loop_pairs = {});

// File-level pipeline: parses the configured inputs (running the PDR
// front end when an IMU log is given, otherwise ingesting the step
// log), writes trajectory.csv, loops.csv, solve_report.txt,
// metrics.csv and cdf.csv into output_dir as applicable, and returns
// the result.
PipelineResult run_pipeline_files(const PipelineConfig& config);

struct SimulateSummary {
  int step_count = 0;
  double path_length_m = 0.0;
  double duration_s = 0.0;
  int observation_count = 0;
};

// Writes gt.csv, steps.csv, imu.csv and rtt.csv into output_dir.
SimulateSummary run_simulate_files(const SimConfig& sim, const PdrConfig& pdr,
                                   const std::filesystem::path& output_dir);

}  // namespace rttslam
