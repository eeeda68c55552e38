#include "rttslam/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <system_error>

#include "rttslam/errors.hpp"

namespace rttslam::io {

namespace {

[[noreturn]] void fail(const std::string& name, int line, const std::string& what) {
  throw InputError(name + ", line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_finite(const std::string& field, const std::string& name,
                    int line) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    fail(name, line, "not a number: '" + field + "'");
  }
  if (!std::isfinite(value)) {
    fail(name, line, "non-finite value: '" + field + "'");
  }
  return value;
}

long parse_integer(const std::string& field, const std::string& name,
                   int line) {
  long value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    fail(name, line, "not an integer: '" + field + "'");
  }
  return value;
}

// Strips one trailing CR so files written on other platforms still load.
void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
}

class CsvReader {
 public:
  CsvReader(std::istream& is, std::string name, const std::string& header)
      : is_(is), name_(std::move(name)) {
    std::string line;
    if (!std::getline(is_, line)) {
      fail(name_, 1, "missing header row");
    }
    strip_cr(line);
    ++line_;
    if (line != header) {
      fail(name_, 1, "expected header '" + header + "', found '" + line + "'");
    }
  }

  bool next(std::vector<std::string>& fields, std::size_t expected) {
    std::string line;
    while (std::getline(is_, line)) {
      strip_cr(line);
      ++line_;
      if (line.empty()) {
        continue;
      }
      fields = split_fields(line);
      if (fields.size() != expected) {
        fail(name_, line_,
             "expected " + std::to_string(expected) + " fields, found " +
                 std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  int line() const { return line_; }
  const std::string& name() const { return name_; }

 private:
  std::istream& is_;
  std::string name_;
  int line_ = 0;
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw InputError("cannot open input file: " + path.string());
  }
  return is;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);  // binary keeps LF endings
  if (!os) {
    throw InputError("cannot open output file: " + path.string());
  }
  return os;
}

void finish_output(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) {
    throw InputError("failed writing output file: " + path.string());
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::vector<ImuSample> parse_imu_log(std::istream& is,
                                     const std::string& name) {
  CsvReader reader(is, name, "t,ax,ay,az,gx,gy,gz,mx,my,mz");
  std::vector<ImuSample> out;
  std::vector<std::string> f;
  double last_t = -std::numeric_limits<double>::infinity();
  while (reader.next(f, 10)) {
    ImuSample s;
    s.t = parse_finite(f[0], name, reader.line());
    for (int i = 0; i < 3; ++i) {
      s.accel[static_cast<std::size_t>(i)] =
          parse_finite(f[1 + static_cast<std::size_t>(i)], name, reader.line());
      s.gyro[static_cast<std::size_t>(i)] =
          parse_finite(f[4 + static_cast<std::size_t>(i)], name, reader.line());
      s.mag[static_cast<std::size_t>(i)] =
          parse_finite(f[7 + static_cast<std::size_t>(i)], name, reader.line());
    }
    if (!(s.t > last_t)) {
      fail(name, reader.line(), "timestamp does not increase");
    }
    last_t = s.t;
    out.push_back(s);
  }
  return out;
}

std::vector<RttObservation> parse_rtt_log(std::istream& is,
                                          const std::string& name) {
  CsvReader reader(is, name, "t,ap_id,range_m,stddev_m");
  std::vector<RttObservation> out;
  std::vector<std::string> f;
  while (reader.next(f, 4)) {
    const double t = parse_finite(f[0], name, reader.line());
    const std::string& ap = f[1];
    if (ap.empty()) {
      fail(name, reader.line(), "empty ap_id");
    }
    RttRange range;
    range.range_m = parse_finite(f[2], name, reader.line());
    if (range.range_m < 0.0) {
      fail(name, reader.line(), "negative range");
    }
    if (!f[3].empty()) {
      range.stddev_m = parse_finite(f[3], name, reader.line());
    }
    if (out.empty() || out.back().t != t) {
      if (!out.empty() && !(t > out.back().t)) {
        fail(name, reader.line(), "timestamp does not increase");
      }
      out.push_back(RttObservation{t, {}});
    }
    if (!out.back().ranges.emplace(ap, range).second) {
      fail(name, reader.line(), "duplicate ap_id '" + ap +
                                    "' within one observation");
    }
  }
  return out;
}

std::vector<StepEvent> parse_step_log(std::istream& is,
                                      const std::string& name) {
  CsvReader reader(is, name, "j,t_start,t_end,length_m,heading_rad");
  std::vector<StepEvent> out;
  std::vector<std::string> f;
  while (reader.next(f, 5)) {
    StepEvent s;
    s.index = static_cast<int>(parse_integer(f[0], name, reader.line()));
    s.t_start = parse_finite(f[1], name, reader.line());
    s.t_end = parse_finite(f[2], name, reader.line());
    s.length = parse_finite(f[3], name, reader.line());
    s.heading = parse_finite(f[4], name, reader.line());
    if (!(s.t_start < s.t_end)) {
      fail(name, reader.line(), "t_start must precede t_end");
    }
    if (s.length < 0.0) {
      fail(name, reader.line(), "negative step length");
    }
    if (!out.empty()) {
      if (s.index <= out.back().index) {
        fail(name, reader.line(), "step index does not increase");
      }
      if (s.t_start < out.back().t_end) {
        fail(name, reader.line(), "step overlaps the previous step");
      }
    }
    out.push_back(s);
  }
  return out;
}

Trajectory parse_trajectory(std::istream& is, const std::string& name) {
  CsvReader reader(is, name, "t,x,y,theta");
  Trajectory out;
  std::vector<std::string> f;
  while (reader.next(f, 4)) {
    TimedPose p;
    p.t = parse_finite(f[0], name, reader.line());
    const double x = parse_finite(f[1], name, reader.line());
    const double y = parse_finite(f[2], name, reader.line());
    const double theta = parse_finite(f[3], name, reader.line());
    p.pose = Pose2{x, y, theta};
    if (!out.empty() && !(p.t > out.back().t)) {
      fail(name, reader.line(), "timestamp does not increase");
    }
    out.push_back(p);
  }
  return out;
}

void write_imu_log(std::ostream& os, const std::vector<ImuSample>& samples) {
  os << "t,ax,ay,az,gx,gy,gz,mx,my,mz\n";
  for (const ImuSample& s : samples) {
    os << format_double(s.t);
    for (const auto& triple : {s.accel, s.gyro, s.mag}) {
      for (double v : triple) {
        os << ',' << format_double(v);
      }
    }
    os << '\n';
  }
}

void write_rtt_log(std::ostream& os,
                   const std::vector<RttObservation>& observations) {
  os << "t,ap_id,range_m,stddev_m\n";
  for (const RttObservation& obs : observations) {
    for (const auto& [ap, r] : obs.ranges) {
      os << format_double(obs.t) << ',' << ap << ','
         << format_double(r.range_m) << ',';
      if (r.stddev_m) {
        os << format_double(*r.stddev_m);
      }
      os << '\n';
    }
  }
}

void write_step_log(std::ostream& os, const std::vector<StepEvent>& steps) {
  os << "j,t_start,t_end,length_m,heading_rad\n";
  for (const StepEvent& s : steps) {
    os << s.index << ',' << format_double(s.t_start) << ','
       << format_double(s.t_end) << ',' << format_double(s.length) << ','
       << format_double(s.heading) << '\n';
  }
}

void write_trajectory(std::ostream& os, const Trajectory& trajectory) {
  os << "t,x,y,theta\n";
  for (const TimedPose& p : trajectory) {
    os << format_double(p.t) << ',' << format_double(p.pose.x) << ','
       << format_double(p.pose.y) << ',' << format_double(p.pose.theta)
       << '\n';
  }
}

void write_loop_report(std::ostream& os,
                       const std::vector<LoopReportRow>& rows) {
  os << "node_i,node_k,d_rtt_m,s_final\n";
  for (const LoopReportRow& r : rows) {
    os << r.node_i << ',' << r.node_k << ',' << format_double(r.d_rtt_m)
       << ',' << format_double(r.s_final) << '\n';
  }
}

void write_metrics(std::ostream& os, const MetricsReport& report) {
  os << "metric,value\n";
  os << "rmse_m," << format_double(report.rmse) << '\n';
  os << "endpoint_error_m," << format_double(report.endpoint_error) << '\n';
  os << "percentile_90_m," << format_double(report.percentile_90) << '\n';
}

void write_cdf(std::ostream& os, const MetricsReport& report) {
  os << "error_m,cumulative_fraction\n";
  for (const CdfSample& s : report.cdf) {
    os << format_double(s.error) << ',' << format_double(s.fraction) << '\n';
  }
}

void write_solve_report(std::ostream& os, const SolveReport& report) {
  os << "iterations_used " << report.iterations_used << '\n';
  os << "converged " << (report.converged ? "true" : "false") << '\n';
  os << "initial_cost " << format_double(report.initial_cost) << '\n';
  os << "final_cost " << format_double(report.final_cost) << '\n';
  os << "loop_edges " << report.loop_scaling.size() << '\n';
  // Histogram of scaling factors over ten equal bins of (0, 1].
  constexpr int kBins = 10;
  int hist[kBins] = {};
  for (double s : report.loop_scaling) {
    int bin = static_cast<int>(std::floor(s * kBins));
    bin = std::clamp(bin, 0, kBins - 1);
    ++hist[bin];
  }
  static constexpr const char* kEdges[kBins + 1] = {
      "0.0", "0.1", "0.2", "0.3", "0.4", "0.5",
      "0.6", "0.7", "0.8", "0.9", "1.0"};
  for (int b = 0; b < kBins; ++b) {
    os << "s_hist_" << kEdges[b] << '_' << kEdges[b + 1] << ' ' << hist[b]
       << '\n';
  }
}

std::vector<ImuSample> parse_imu_log(const std::filesystem::path& path) {
  auto is = open_input(path);
  return parse_imu_log(is, path.string());
}

std::vector<RttObservation> parse_rtt_log(const std::filesystem::path& path) {
  auto is = open_input(path);
  return parse_rtt_log(is, path.string());
}

std::vector<StepEvent> parse_step_log(const std::filesystem::path& path) {
  auto is = open_input(path);
  return parse_step_log(is, path.string());
}

Trajectory parse_trajectory(const std::filesystem::path& path) {
  auto is = open_input(path);
  return parse_trajectory(is, path.string());
}

void write_imu_log(const std::filesystem::path& path,
                   const std::vector<ImuSample>& samples) {
  auto os = open_output(path);
  write_imu_log(os, samples);
  finish_output(os, path);
}

void write_rtt_log(const std::filesystem::path& path,
                   const std::vector<RttObservation>& observations) {
  auto os = open_output(path);
  write_rtt_log(os, observations);
  finish_output(os, path);
}

void write_step_log(const std::filesystem::path& path,
                    const std::vector<StepEvent>& steps) {
  auto os = open_output(path);
  write_step_log(os, steps);
  finish_output(os, path);
}

void write_trajectory(const std::filesystem::path& path,
                      const Trajectory& trajectory) {
  auto os = open_output(path);
  write_trajectory(os, trajectory);
  finish_output(os, path);
}

void write_loop_report(const std::filesystem::path& path,
                       const std::vector<LoopReportRow>& rows) {
  auto os = open_output(path);
  write_loop_report(os, rows);
  finish_output(os, path);
}

void write_metrics(const std::filesystem::path& path,
                   const MetricsReport& report) {
  auto os = open_output(path);
  write_metrics(os, report);
  finish_output(os, path);
}

void write_cdf(const std::filesystem::path& path,
               const MetricsReport& report) {
  auto os = open_output(path);
  write_cdf(os, report);
  finish_output(os, path);
}

void write_solve_report(const std::filesystem::path& path,
                        const SolveReport& report) {
  auto os = open_output(path);
  write_solve_report(os, report);
  finish_output(os, path);
}

}  // namespace rttslam::io
