#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rttslam/metrics.hpp"
#include "rttslam/solver.hpp"
#include "rttslam/types.hpp"

// Line-oriented CSV schemas shared by the tools and the simulator
// (comma separated, mandatory header row, UTF-8, LF endings):
//   imu:        t,ax,ay,az,gx,gy,gz,mx,my,mz
//   rtt:        t,ap_id,range_m,stddev_m   (one row per observation-AP;
//               rows sharing t form one observation; stddev may be empty)
//   steps:      j,t_start,t_end,length_m,heading_rad
//   trajectory: t,x,y,theta
//   loops:      node_i,node_k,d_rtt_m,s_final
// Parsers validate strictly and report the offending line number.
namespace rttslam::io {

std::vector<ImuSample> parse_imu_log(std::istream& is,
                                     const std::string& name);
std::vector<ImuSample> parse_imu_log(const std::filesystem::path& path);

std::vector<RttObservation> parse_rtt_log(std::istream& is,
                                          const std::string& name);
std::vector<RttObservation> parse_rtt_log(const std::filesystem::path& path);

std::vector<StepEvent> parse_step_log(std::istream& is,
                                      const std::string& name);
std::vector<StepEvent> parse_step_log(const std::filesystem::path& path);

Trajectory parse_trajectory(std::istream& is, const std::string& name);
Trajectory parse_trajectory(const std::filesystem::path& path);

void write_imu_log(std::ostream& os, const std::vector<ImuSample>& samples);
void write_imu_log(const std::filesystem::path& path,
                   const std::vector<ImuSample>& samples);

void write_rtt_log(std::ostream& os,
                   const std::vector<RttObservation>& observations);
void write_rtt_log(const std::filesystem::path& path,
                   const std::vector<RttObservation>& observations);

void write_step_log(std::ostream& os, const std::vector<StepEvent>& steps);
void write_step_log(const std::filesystem::path& path,
                    const std::vector<StepEvent>& steps);

void write_trajectory(std::ostream& os, const Trajectory& trajectory);
void write_trajectory(const std::filesystem::path& path,
                      const Trajectory& trajectory);

struct LoopReportRow {
  int node_i = 0;
  int node_k = 0;
  double d_rtt_m = 0.0;
  double s_final = 1.0;
};

void write_loop_report(std::ostream& os,
                       const std::vector<LoopReportRow>& rows);
void write_loop_report(const std::filesystem::path& path,
                       const std::vector<LoopReportRow>& rows);

// metric,value rows plus a separate two-column CDF export for plotting.
void write_metrics(std::ostream& os, const MetricsReport& report);
void write_metrics(const std::filesystem::path& path,
                   const MetricsReport& report);
void write_cdf(std::ostream& os, const MetricsReport& report);
void write_cdf(const std::filesystem::path& path, const MetricsReport& report);

// Iterations, costs, convergence and a ten-bin histogram of the final
// loop scaling factors.
void write_solve_report(std::ostream& os, const SolveReport& report);
void write_solve_report(const std::filesystem::path& path,
                        const SolveReport& report);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace rttslam::io
