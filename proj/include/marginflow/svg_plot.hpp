#pragma once

#include <string>
#include <vector>

namespace marginflow {

// Minimal native SVG line charts: a median polyline per series with an
// optional interquartile band. Rendering is a pure function of the chart
// description, so regenerating from the same data yields identical markup.
struct SvgSeries {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x;
  std::vector<double> y;        // median line
  std::vector<double> band_lo;  // optional, same length as x
  std::vector<double> band_hi;
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  int width = 640;
  int height = 420;
  std::vector<SvgSeries> series;
};

std::string render_svg(const SvgChart& chart);

}  // namespace marginflow
