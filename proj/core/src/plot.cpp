#include "frl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "frl/csv.hpp"

namespace frl {

namespace {

constexpr double kWidth = 800.0, kHeight = 520.0;
constexpr double kLeft = 72.0, kRight = 24.0, kTop = 44.0, kBottom = 56.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace

void render_plot(const std::vector<PlotSeries>& series, const AxesSpec& axes,
                 const std::string& path) {
  if (series.empty()) throw std::invalid_argument("render_plot: no series");
  for (const PlotSeries& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size()) {
      throw std::invalid_argument("render_plot: series '" + s.label + "' is empty or ragged");
    }
  }

  // Transform y for log axes, clipping at the floor and flagging the legend.
  std::vector<std::vector<double>> ys(series.size());
  std::vector<bool> clipped(series.size(), false);
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (std::size_t i = 0; i < series.size(); ++i) {
    ys[i].reserve(series[i].y.size());
    for (std::size_t j = 0; j < series[i].y.size(); ++j) {
      double v = series[i].y[j];
      if (axes.log_y) {
        if (v < kLogFloor) {
          v = kLogFloor;
          clipped[i] = true;
        }
        v = std::log10(v);
      }
      ys[i].push_back(v);
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
      xmin = std::min(xmin, series[i].x[j]);
      xmax = std::max(xmax, series[i].x[j]);
    }
  }
  if (xmin == xmax) { xmin -= 0.5; xmax += 0.5; }
  if (ymin == ymax) { ymin -= 0.5; ymax += 0.5; }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!axes.title.empty()) {
    svg << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << escape(axes.title) << "</text>\n";
  }

  // frame
  svg << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(plot_w)
      << "\" height=\"" << fmt(plot_h) << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // ticks
  for (int t = 0; t <= 4; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 4.0;
    const double fy = ymin + (ymax - ymin) * t / 4.0;
    svg << "<line x1=\"" << fmt(px(fx)) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\""
        << fmt(px(fx)) << "\" y2=\"" << fmt(kTop + plot_h + 5) << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << fmt(px(fx)) << "\" y=\"" << fmt(kTop + plot_h + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_tick(fx) << "</text>\n";
    const double yy = py(fy);
    svg << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(yy) << "\" x2=\"" << fmt(kLeft)
        << "\" y2=\"" << fmt(yy) << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(yy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_tick(axes.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
  }

  // axis labels
  svg << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(axes.x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << fmt(kTop + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << fmt(kTop + plot_h / 2) << ")\">"
      << escape(axes.y_label + (axes.log_y ? " (log)" : "")) << "</text>\n";

  // polylines
  for (std::size_t i = 0; i < series.size(); ++i) {
    svg << "<polyline fill=\"none\" stroke=\"" << kPalette[i % 8]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t j = 0; j < series[i].x.size(); ++j) {
      svg << fmt(px(series[i].x[j])) << ',' << fmt(py(ys[i][j])) << ' ';
    }
    svg << "\"/>\n";
  }

  // legend
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(i);
    std::string label = series[i].label;
    if (clipped[i]) label += " (clipped)";
    svg << "<line x1=\"" << fmt(kLeft + plot_w - 150) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(kLeft + plot_w - 130) << "\" y2=\"" << fmt(ly) << "\" stroke=\""
        << kPalette[i % 8] << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(kLeft + plot_w - 124) << "\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(label) << "</text>\n";
  }

  svg << "</svg>\n";
  write_text_file(path, svg.str());
}

}  // namespace frl
