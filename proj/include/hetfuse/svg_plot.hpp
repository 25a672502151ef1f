#pragma once

#include <string>
#include <vector>

namespace hetfuse {

/// Minimal line-chart SVG writer for the RMSE/NEES curves.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotHLine {
  std::string label;
  double y = 0.0;
};

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series,
                      const std::vector<PlotHLine>& hlines = {});

}  // namespace hetfuse
