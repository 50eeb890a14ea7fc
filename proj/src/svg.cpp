#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrl/harness.hpp"

namespace qrl {

namespace {

constexpr int kWidth = 960;
constexpr int kHeight = 560;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 180;  // room for the legend
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* kPalette[] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#ad494a",
};

std::string coord(double v) {
  // Two decimals keep the file small and are well under a pixel.
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void emit_learning_curve_svg(const std::vector<AggregateSeries>& series,
                             const std::string& path, bool log_x) {
  if (series.empty())
    throw std::invalid_argument("emit_learning_curve_svg: no series");

  std::size_t episodes = 0;
  double y_max = 1.0;
  for (const AggregateSeries& s : series) {
    episodes = std::max(episodes, s.median_steps.size());
    for (double v : s.median_steps) y_max = std::max(y_max, v);
  }
  if (episodes < 1)
    throw std::invalid_argument("emit_learning_curve_svg: empty series");
  y_max *= 1.05;  // headroom above the tallest curve

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const double x_span =
      log_x ? std::log10(static_cast<double>(episodes)) : episodes - 1.0;

  auto x_of = [&](std::size_t e) {
    double t;
    if (log_x) {
      t = x_span > 0.0 ? std::log10(e + 1.0) / x_span : 0.0;
    } else {
      t = x_span > 0.0 ? e / x_span : 0.0;
    }
    return kMarginLeft + t * plot_w;
  };
  auto y_of = [&](double steps) {
    return kMarginTop + (1.0 - steps / y_max) * plot_h;
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(kWidth) + "\" height=\"" + std::to_string(kHeight) +
         "\" viewBox=\"0 0 " + std::to_string(kWidth) + " " +
         std::to_string(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(kMarginLeft) +
         "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
         "steps per episode (median across seeds)</text>\n";

  // Axes.
  const double x0 = kMarginLeft, x1 = kMarginLeft + plot_w;
  const double y0 = kMarginTop + plot_h, y1 = kMarginTop;
  svg += "<line x1=\"" + coord(x0) + "\" y1=\"" + coord(y0) + "\" x2=\"" +
         coord(x1) + "\" y2=\"" + coord(y0) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + coord(x0) + "\" y1=\"" + coord(y0) + "\" x2=\"" +
         coord(x0) + "\" y2=\"" + coord(y1) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // Y ticks: five evenly spaced labels.
  for (int i = 0; i <= 4; ++i) {
    const double value = y_max * i / 4.0;
    const double y = y_of(value);
    svg += "<line x1=\"" + coord(x0 - 4) + "\" y1=\"" + coord(y) +
           "\" x2=\"" + coord(x1) + "\" y2=\"" + coord(y) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + coord(x0 - 8) + "\" y=\"" + coord(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"12\">" +
           format_double(std::round(value)) + "</text>\n";
  }

  // X ticks.
  const int x_ticks = 5;
  for (int i = 0; i <= x_ticks; ++i) {
    std::size_t e;
    if (log_x) {
      const double exp = x_span * i / x_ticks;
      e = static_cast<std::size_t>(std::llround(std::pow(10.0, exp))) - 1;
    } else {
      e = static_cast<std::size_t>((episodes - 1) *
                                   (static_cast<double>(i) / x_ticks));
    }
    e = std::min(e, episodes - 1);
    const double x = x_of(e);
    svg += "<line x1=\"" + coord(x) + "\" y1=\"" + coord(y0) + "\" x2=\"" +
           coord(x) + "\" y2=\"" + coord(y0 + 4) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + coord(x) + "\" y=\"" + coord(y0 + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">" +
           std::to_string(e) + "</text>\n";
  }
  svg += "<text x=\"" + coord((x0 + x1) / 2) + "\" y=\"" +
         coord(y0 + 38) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">episode" +
         (log_x ? std::string(" (log scale)") : std::string()) + "</text>\n";

  // One polyline per series, thinned to at most ~1200 points.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const AggregateSeries& s = series[i];
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(*kPalette))];
    const std::size_t n = s.median_steps.size();
    const std::size_t stride = std::max<std::size_t>(1, n / 1200);
    std::string points;
    for (std::size_t e = 0; e < n; e += stride) {
      points += coord(x_of(e)) + "," + coord(y_of(s.median_steps[e])) + " ";
    }
    if ((n - 1) % stride != 0)  // always include the final episode
      points += coord(x_of(n - 1)) + "," + coord(y_of(s.median_steps[n - 1]));
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
  }

  // Legend, top-right of the plot area.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const AggregateSeries& s = series[i];
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(*kPalette))];
    const double ly = kMarginTop + 10 + 18.0 * i;
    const double lx = kWidth - kMarginRight + 16;
    svg += "<line x1=\"" + coord(lx) + "\" y1=\"" + coord(ly) + "\" x2=\"" +
           coord(lx + 22) + "\" y2=\"" + coord(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + coord(lx + 28) + "\" y=\"" + coord(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + s.agent +
           " alpha=" + format_double(s.alpha) + "</text>\n";
  }

  svg += "</svg>\n";

  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  file << svg;
  if (!file) throw std::runtime_error("write failed: " + path);
}

}  // namespace qrl
