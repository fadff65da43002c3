#include "marginflow/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace marginflow {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void absorb(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo < hi)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double margin = 0.05 * (hi - lo);
    lo -= margin;
    hi += margin;
  }
};

std::vector<double> ticks(double lo, double hi, int target = 5) {
  const double span = hi - lo;
  double step = std::pow(10.0, std::floor(std::log10(span / target)));
  for (double mult : {5.0, 2.0, 1.0}) {
    if (span / (step * mult) >= target) {
      step *= mult;
      break;
    }
  }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) out.push_back(v);
  return out;
}

}  // namespace

std::string render_svg(const SvgChart& chart) {
  const int margin_l = 64, margin_r = 16, margin_t = 32, margin_b = 48;
  const double plot_w = chart.width - margin_l - margin_r;
  const double plot_h = chart.height - margin_t - margin_b;

  Range rx, ry;
  for (const auto& s : chart.series) {
    for (double v : s.x) rx.absorb(chart.log_x ? std::log10(v) : v);
    for (double v : s.y) ry.absorb(v);
    for (double v : s.band_lo) ry.absorb(v);
    for (double v : s.band_hi) ry.absorb(v);
  }
  if (!std::isfinite(rx.lo) || !std::isfinite(ry.lo))
    throw std::invalid_argument("render_svg: no data");
  rx.pad();
  ry.pad();

  auto px = [&](double v) {
    const double t = ((chart.log_x ? std::log10(v) : v) - rx.lo) / (rx.hi - rx.lo);
    return margin_l + t * plot_w;
  };
  auto py = [&](double v) {
    const double t = (v - ry.lo) / (ry.hi - ry.lo);
    return margin_t + (1.0 - t) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\""
      << chart.height << "\" viewBox=\"0 0 " << chart.width << " " << chart.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << chart.width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
      << chart.title << "</text>\n";

  // axes
  svg << "<line x1=\"" << margin_l << "\" y1=\"" << margin_t + plot_h << "\" x2=\""
      << margin_l + plot_w << "\" y2=\"" << margin_t + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << margin_l << "\" y1=\"" << margin_t << "\" x2=\"" << margin_l << "\" y2=\""
      << margin_t + plot_h << "\" stroke=\"black\"/>\n";

  for (double tx : ticks(rx.lo, rx.hi)) {
    const double raw = chart.log_x ? std::pow(10.0, tx) : tx;
    const double x = margin_l + (tx - rx.lo) / (rx.hi - rx.lo) * plot_w;
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << margin_t + plot_h << "\" x2=\"" << fmt(x)
        << "\" y2=\"" << margin_t + plot_h + 4 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << margin_t + plot_h + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(raw) << "</text>\n";
  }
  for (double ty : ticks(ry.lo, ry.hi)) {
    const double y = py(ty);
    svg << "<line x1=\"" << margin_l - 4 << "\" y1=\"" << fmt(y) << "\" x2=\"" << margin_l
        << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << margin_l - 8 << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(ty) << "</text>\n";
  }
  svg << "<text x=\"" << margin_l + plot_w / 2 << "\" y=\"" << chart.height - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">" << chart.x_label << "</text>\n";
  svg << "<text x=\"16\" y=\"" << margin_t + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << margin_t + plot_h / 2 << ")\">" << chart.y_label << "</text>\n";

  int legend_row = 0;
  for (const auto& s : chart.series) {
    if (!s.band_lo.empty() && s.band_lo.size() == s.x.size() && s.band_hi.size() == s.x.size()) {
      svg << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        svg << fmt(px(s.x[i])) << "," << fmt(py(s.band_hi[i])) << " ";
      for (std::size_t i = s.x.size(); i-- > 0;)
        svg << fmt(px(s.x[i])) << "," << fmt(py(s.band_lo[i])) << " ";
      svg << "\"/>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      svg << fmt(px(s.x[i])) << "," << fmt(py(s.y[i])) << " ";
    svg << "\"/>\n";
    const double ly = margin_t + 14 + 16 * legend_row++;
    svg << "<line x1=\"" << margin_l + plot_w - 120 << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << margin_l + plot_w - 100 << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << margin_l + plot_w - 94 << "\" y=\"" << fmt(ly + 4)
        << "\" font-size=\"11\">" << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace marginflow
