#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "otm/point_cloud.hpp"

namespace otm {

struct ScatterSeries {
  std::string label;
  std::string color;  // SVG color name or #rrggbb
  const PointCloud* points = nullptr;
};

/// Fixed 800x800 scatter plot: axes auto-scale to the union bounding box
/// with a 5% margin; points are radius-2 circles. Clouds with more than two
/// coordinates are projected onto their first two.
inline void write_scatter_svg(const std::string& path,
                              const std::vector<ScatterSeries>& series) {
  constexpr double kSize = 800.0;
  constexpr double kRadius = 2.0;

  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  for (const ScatterSeries& s : series) {
    if (!s.points) throw std::invalid_argument("scatter: null series");
    for (Index i = 0; i < s.points->size(); ++i) {
      lo_x = std::min(lo_x, s.points->at(i, 0));
      hi_x = std::max(hi_x, s.points->at(i, 0));
      const double y = s.points->dim > 1 ? s.points->at(i, 1) : 0.0;
      lo_y = std::min(lo_y, y);
      hi_y = std::max(hi_y, y);
    }
  }
  if (lo_x > hi_x) {  // nothing to draw
    lo_x = lo_y = -1.0;
    hi_x = hi_y = 1.0;
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
  const double margin = 0.05 * span;
  const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  const double half = 0.5 * span + margin;
  const double scale = kSize / (2.0 * half);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("scatter: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
         "viewBox=\"0 0 800 800\">\n";
  out << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
  char buf[160];
  for (const ScatterSeries& s : series) {
    out << "<g fill=\"" << s.color << "\" data-label=\"" << s.label << "\">\n";
    for (Index i = 0; i < s.points->size(); ++i) {
      const double x = (s.points->at(i, 0) - cx) * scale + kSize / 2.0;
      const double y = s.points->dim > 1 ? s.points->at(i, 1) : 0.0;
      const double py = kSize / 2.0 - (y - cy) * scale;
      std::snprintf(buf, sizeof(buf), "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.1f\"/>\n", x, py,
                    kRadius);
      out << buf;
    }
    out << "</g>\n";
  }
  // Legend swatches in the top-left corner.
  double ly = 20.0;
  for (const ScatterSeries& s : series) {
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"16\" cy=\"%.0f\" r=\"5\" fill=\"%s\"/>"
                  "<text x=\"28\" y=\"%.0f\" font-size=\"14\">%s</text>\n",
                  ly, s.color.c_str(), ly + 5.0, s.label.c_str());
    out << buf;
    ly += 22.0;
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("scatter: write failed for " + path);
}

}  // namespace otm
