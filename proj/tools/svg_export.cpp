#include "svg_export.hpp"

#include <algorithm>
#include <fstream>

#include "rttslam/errors.hpp"
#include "rttslam/io.hpp"

namespace rttslam::tools {

void write_svg(const std::filesystem::path& path,
               const std::vector<SvgLayer>& layers,
               const std::vector<ApSite>& access_points) {
  double min_x = 0.0, max_x = 1.0, min_y = 0.0, max_y = 1.0;
  bool first = true;
  const auto grow = [&](double x, double y) {
    if (first) {
      min_x = max_x = x;
      min_y = max_y = y;
      first = false;
      return;
    }
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  };
  for (const SvgLayer& layer : layers) {
    for (const TimedPose& p : *layer.trajectory) {
      grow(p.pose.x, p.pose.y);
    }
  }
  for (const ApSite& ap : access_points) {
    grow(ap.x, ap.y);
  }

  const double margin = 1.0;
  min_x -= margin;
  min_y -= margin;
  max_x += margin;
  max_y += margin;
  const double width = 800.0;
  const double scale = width / (max_x - min_x);
  const double height = (max_y - min_y) * scale;

  const auto sx = [&](double x) { return (x - min_x) * scale; };
  const auto sy = [&](double y) { return height - (y - min_y) * scale; };

  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw InputError("cannot open svg output: " + path.string());
  }
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
     << io::format_double(width) << "\" height=\"" << io::format_double(height)
     << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const SvgLayer& layer : layers) {
    os << "<polyline fill=\"none\" stroke=\"" << layer.color
       << "\" stroke-width=\"1.5\" points=\"";
    for (const TimedPose& p : *layer.trajectory) {
      os << io::format_double(sx(p.pose.x)) << ','
         << io::format_double(sy(p.pose.y)) << ' ';
    }
    os << "\"/>\n";
  }
  for (const ApSite& ap : access_points) {
    os << "<rect x=\"" << io::format_double(sx(ap.x) - 4.0) << "\" y=\""
       << io::format_double(sy(ap.y) - 4.0)
       << "\" width=\"8\" height=\"8\" fill=\"red\"/>\n"
       << "<text x=\"" << io::format_double(sx(ap.x) + 6.0) << "\" y=\""
       << io::format_double(sy(ap.y)) << "\" font-size=\"12\">" << ap.id
       << "</text>\n";
  }
  double ly = 18.0;
  for (const SvgLayer& layer : layers) {
    os << "<text x=\"10\" y=\"" << io::format_double(ly)
       << "\" font-size=\"14\" fill=\"" << layer.color << "\">"
       << layer.label << "</text>\n";
    ly += 18.0;
  }
  os << "</svg>\n";
  os.flush();
  if (!os) {
    throw InputError("failed writing svg output: " + path.string());
  }
}

}  // namespace rttslam::tools
