#pragma once

#include <string>
#include <vector>

namespace ptlat {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  // Draw point markers instead of a polyline.
  bool markers = false;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

// Self-contained SVG document with a fixed 800x600 viewBox. Non-finite
// samples break the line.
std::string render_svg(const LinePlot& plot);

}  // namespace ptlat
