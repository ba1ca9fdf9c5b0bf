// SPDX-License-Identifier: Apache-2.0

#include "unlidar/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "unlidar/error.hpp"

namespace unlidar {

namespace {

constexpr double kPanel = 360.0;
constexpr double kMargin = 56.0;
constexpr double kGap = 24.0;
constexpr double kTop = 48.0;
constexpr double kLegend = 28.0;

const std::array<const char*, 3> kDefaultColors = {"#2ca02c", "#d62728", "#1f77b4"};
const std::array<const char*, 4> kExtraColors = {"#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string fmt(double v, int prec = 2) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

int tick_precision(const std::vector<double>& ticks) {
  if (ticks.size() < 2) return 1;
  const double step = ticks[1] - ticks[0];
  return std::clamp(static_cast<int>(std::ceil(-std::log10(step))), 0, 6);
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (hi < lo) std::swap(lo, hi);
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double raw = (hi - lo) / std::max(target, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  const auto first = static_cast<long long>(std::floor(lo / step + 1e-9));
  const auto last = static_cast<long long>(std::ceil(hi / step - 1e-9));
  std::vector<double> out;
  for (long long i = first; i <= std::max(last, first + 1); ++i) out.push_back(static_cast<double>(i) * step);
  return out;
}

PlotLayer trajectory_layer(const Trajectory& tr, std::string label, bool as_markers) {
  PlotLayer layer;
  layer.label = std::move(label);
  layer.as_markers = as_markers;
  for (const TrajectorySample& s : tr.samples) layer.points.push_back(s.position);
  return layer;
}

std::string render_projections_svg(const std::vector<PlotLayer>& input, const std::string& title) {
  std::vector<PlotLayer> layers;
  for (const PlotLayer& l : input) {
    if (!l.points.empty()) layers.push_back(l);
  }
  if (layers.empty()) throw Error(ErrorCode::EmptyInput, "nothing to plot");
  std::size_t extra = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].color.empty()) {
      layers[i].color = i < kDefaultColors.size() ? kDefaultColors[i] : kExtraColors[extra++ % kExtraColors.size()];
    }
  }

  Vector3 lo = Vector3::Constant(std::numeric_limits<double>::infinity());
  Vector3 hi = -lo;
  for (const PlotLayer& l : layers) {
    for (const Vector3& p : l.points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }

  const double width = 2.0 * kMargin + 3.0 * kPanel + 2.0 * (kGap + kMargin);
  const double height = kTop + kPanel + kMargin + kLegend * static_cast<double>(layers.size()) + 16.0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width, 0) << "\" height=\""
      << fmt(height, 0) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << fmt(width / 2, 1) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(title) << "</text>\n";
  }

  static constexpr std::array<std::array<int, 2>, 3> kAxes = {{{0, 1}, {0, 2}, {1, 2}}};
  static constexpr std::array<const char*, 3> kNames = {"x", "y", "z"};
  for (std::size_t panel = 0; panel < kAxes.size(); ++panel) {
    const int a = kAxes[panel][0];
    const int b = kAxes[panel][1];
    const auto xt = nice_ticks(lo[a], hi[a]);
    const auto yt = nice_ticks(lo[b], hi[b]);
    const double x0 = kMargin + static_cast<double>(panel) * (kPanel + kGap + kMargin);
    const double y0 = kTop;
    const double xmin = xt.front(), xmax = xt.back();
    const double ymin = yt.front(), ymax = yt.back();
    auto px = [&](double v) { return x0 + (v - xmin) / (xmax - xmin) * kPanel; };
    auto py = [&](double v) { return y0 + kPanel - (v - ymin) / (ymax - ymin) * kPanel; };

    svg << "<g class=\"panel\" id=\"panel-" << kNames[a] << kNames[b] << "\">\n";
    svg << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(kPanel) << "\" height=\""
        << fmt(kPanel) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    const int xp = tick_precision(xt);
    const int yp = tick_precision(yt);
    for (double v : xt) {
      svg << "<line x1=\"" << fmt(px(v)) << "\" y1=\"" << fmt(y0 + kPanel) << "\" x2=\"" << fmt(px(v))
          << "\" y2=\"" << fmt(y0 + kPanel + 5) << "\" stroke=\"#333\"/>"
          << "<text x=\"" << fmt(px(v)) << "\" y=\"" << fmt(y0 + kPanel + 18)
          << "\" text-anchor=\"middle\">" << fmt(v, xp) << "</text>\n";
    }
    for (double v : yt) {
      svg << "<line x1=\"" << fmt(x0 - 5) << "\" y1=\"" << fmt(py(v)) << "\" x2=\"" << fmt(x0) << "\" y2=\""
          << fmt(py(v)) << "\" stroke=\"#333\"/>"
          << "<text x=\"" << fmt(x0 - 8) << "\" y=\"" << fmt(py(v) + 4) << "\" text-anchor=\"end\">"
          << fmt(v, yp) << "</text>\n";
    }
    svg << "<text x=\"" << fmt(x0 + kPanel / 2) << "\" y=\"" << fmt(y0 + kPanel + 36)
        << "\" text-anchor=\"middle\">" << kNames[a] << " (m)</text>\n";
    svg << "<text x=\"" << fmt(x0 - 40) << "\" y=\"" << fmt(y0 + kPanel / 2) << "\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 " << fmt(x0 - 40) << ' ' << fmt(y0 + kPanel / 2) << ")\">" << kNames[b]
        << " (m)</text>\n";

    for (const PlotLayer& l : layers) {
      svg << "<g class=\"layer\" data-label=\"" << escape(l.label) << "\">";
      if (l.as_markers) {
        for (const Vector3& p : l.points) {
          svg << "<circle cx=\"" << fmt(px(p[a])) << "\" cy=\"" << fmt(py(p[b])) << "\" r=\"1.6\" fill=\""
              << l.color << "\"/>";
        }
      } else {
        svg << "<polyline fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < l.points.size(); ++i) {
          if (i) svg << ' ';
          svg << fmt(px(l.points[i][a])) << ',' << fmt(py(l.points[i][b]));
        }
        svg << "\"/>";
      }
      svg << "</g>\n";
    }
    svg << "</g>\n";
  }

  double ly = kTop + kPanel + kMargin + 8.0;
  svg << "<g class=\"legend\">\n";
  for (const PlotLayer& l : layers) {
    if (l.as_markers) {
      svg << "<circle cx=\"" << fmt(kMargin + 10) << "\" cy=\"" << fmt(ly) << "\" r=\"4\" fill=\"" << l.color
          << "\"/>";
    } else {
      svg << "<line x1=\"" << fmt(kMargin) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(kMargin + 20)
          << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << l.color << "\" stroke-width=\"2\"/>";
    }
    svg << "<text x=\"" << fmt(kMargin + 28) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(l.label)
        << "</text>\n";
    ly += kLegend;
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace unlidar
