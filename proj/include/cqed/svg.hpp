#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cqed/errors.hpp"

// Minimal SVG line/scatter plots so experiment runs can emit a quick look
// without an external plotting dependency. Axes, ticks, polylines, markers;
// nothing more.

namespace cqed {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace detail

inline std::string render_svg(const Plot& plot, int width = 800, int height = 520) {
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool first = true;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (first) {
        x_min = x_max = s.x[i];
        y_min = y_max = s.y[i];
        first = false;
      }
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  const double pad_y = 0.05 * (y_max - y_min);
  y_min -= pad_y;
  y_max += pad_y;

  const double left = 70, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return top + (y_max - y) / (y_max - y_min) * plot_h; };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << plot.title << "</text>\n";

  // frame and ticks
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double xv = x_min + (x_max - x_min) * i / ticks;
    const double yv = y_min + (y_max - y_min) * i / ticks;
    out << "<line x1=\"" << detail::svg_num(sx(xv)) << "\" y1=\"" << top + plot_h << "\" x2=\""
        << detail::svg_num(sx(xv)) << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << detail::svg_num(sx(xv)) << "\" y=\"" << top + plot_h + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << detail::tick_label(xv) << "</text>\n";
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << detail::svg_num(sy(yv)) << "\" x2=\"" << left
        << "\" y2=\"" << detail::svg_num(sy(yv)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << detail::svg_num(sy(yv) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << detail::tick_label(yv) << "</text>\n";
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-size=\"13\">" << plot.x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << top + plot_h / 2 << ")\">" << plot.y_label << "</text>\n";

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const auto& series = plot.series[s];
    const char* color = palette[s % 5];
    if (series.x.size() >= 2 && !series.markers) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < series.x.size(); ++i)
        out << detail::svg_num(sx(series.x[i])) << "," << detail::svg_num(sy(series.y[i])) << " ";
      out << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < series.x.size(); ++i)
        out << "<circle cx=\"" << detail::svg_num(sx(series.x[i])) << "\" cy=\""
            << detail::svg_num(sy(series.y[i])) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    if (!series.label.empty())
      out << "<text x=\"" << left + plot_w - 6 << "\" y=\"" << top + 16 + 16 * double(s)
          << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">" << series.label
          << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

inline void write_svg(const std::string& path, const Plot& plot) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << render_svg(plot);
}

}  // namespace cqed
