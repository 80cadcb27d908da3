#pragma once

#include <string>
#include <vector>

namespace robitmc {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

// Self-contained SVG line chart: axes with ticks, a legend, one polyline per
// series. comment is embedded verbatim as an XML comment (manifest hash).
std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series,
                              const std::string& comment = "",
                              int width = 920, int height = 540);

}  // namespace robitmc
