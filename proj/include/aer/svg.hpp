#pragma once

#include <string>
#include <vector>

namespace aer::svg {

struct LineSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  std::string color = "#1f77b4";
  bool dashed = false;
  bool markers = false;  ///< dots instead of a polyline
};

/// Static line chart with axes, ticks and a legend. NaN points break the line.
std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<LineSeries>& series);

/// Heat map of values[j * nx + i] over x (columns) and t (rows), blue to red.
std::string heatmap(const std::string& title, const std::vector<double>& xs,
                    const std::vector<double>& ts, const std::vector<double>& values);

}  // namespace aer::svg
