#include "robitmc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace robitmc {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (!(lo < hi)) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double m = 0.04 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

}  // namespace

std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series,
                              const std::string& comment, int width,
                              int height) {
  if (series.empty()) {
    throw std::invalid_argument("svg chart: no series");
  }
  Range xr, yr;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) {
      throw std::invalid_argument("svg chart: series '" + s.label +
                                  "' has mismatched x/y lengths");
    }
    for (double v : s.x) xr.include(v);
    for (double v : s.y) yr.include(v);
  }
  if (!std::isfinite(xr.lo) || !std::isfinite(yr.lo)) {
    throw std::invalid_argument("svg chart: no finite data");
  }
  xr.pad();
  yr.pad();

  const double ml = 84, mr = 24, mt = 46, mb = 58;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;
  const auto px = [&](double v) { return ml + (v - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto py = [&](double v) { return mt + ph - (v - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  if (!comment.empty()) svg += "<!-- " + comment + " -->\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(width / 2.0) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + escape_xml(title) + "</text>\n";

  // Frame and ticks.
  svg += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" +
         num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"#444\"/>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / ticks;
    const double gx = px(fx);
    svg += "<line x1=\"" + num(gx) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" +
           num(gx) + "\" y2=\"" + num(mt + ph + 5) + "\" stroke=\"#444\"/>\n";
    svg += "<text x=\"" + num(gx) + "\" y=\"" + num(mt + ph + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + num(fx) + "</text>\n";
    const double fy = yr.lo + (yr.hi - yr.lo) * i / ticks;
    const double gy = py(fy);
    svg += "<line x1=\"" + num(ml - 5) + "\" y1=\"" + num(gy) + "\" x2=\"" +
           num(ml) + "\" y2=\"" + num(gy) + "\" stroke=\"#444\"/>\n";
    svg += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(gy + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + num(fy) + "</text>\n";
  }
  svg += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(height - 14.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" + escape_xml(x_label) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + num(mt + ph / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 " + num(mt + ph / 2) +
         ")\">" + escape_xml(y_label) + "</text>\n";

  for (const auto& s : series) {
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      points += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"1.4\"";
    if (s.dashed) svg += " stroke-dasharray=\"6 4\"";
    svg += " points=\"" + points + "\"/>\n";
  }

  // Legend.
  double ly = mt + 14;
  for (const auto& s : series) {
    const double lx = ml + pw - 190;
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
           num(lx + 26) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + s.color +
           "\" stroke-width=\"1.6\"" +
           (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    svg += "<text x=\"" + num(lx + 32) + "\" y=\"" + num(ly) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" +
           escape_xml(s.label) + "</text>\n";
    ly += 16;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace robitmc
