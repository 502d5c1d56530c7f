#pragma once

#include <string>
#include <vector>

namespace frl {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct AxesSpec {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_y = false;
};

// Values below this floor are clipped on log axes and the legend entry is
// flagged, so vanished quantities stay drawable.
inline constexpr double kLogFloor = 1e-16;

/// Writes a self-contained SVG line plot (polylines, axes, legend).
void render_plot(const std::vector<PlotSeries>& series, const AxesSpec& axes,
                 const std::string& path);

}  // namespace frl
