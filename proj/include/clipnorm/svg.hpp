#pragma once

#include <string>
#include <vector>

namespace clipnorm {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  // points instead of a polyline
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::size_t max_points = 2000;  // per series, evenly thinned
};

// Static SVG line chart.  Non-finite points, and non-positive ones on a log
// axis, are dropped.
std::string svg_line_chart(const std::vector<Series>& series, const ChartOptions& options);

}  // namespace clipnorm
