#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rttslam/simulator.hpp"
#include "rttslam/types.hpp"

namespace rttslam::tools {

struct SvgLayer {
  std::string label;
  std::string color;
  const Trajectory* trajectory = nullptr;
};

// Static top-down rendering of one or more trajectories plus access
// point markers. Fixed canvas width, y axis flipped so +y points up.
void write_svg(const std::filesystem::path& path,
               const std::vector<SvgLayer>& layers,
               const std::vector<ApSite>& access_points);

}  // namespace rttslam::tools
