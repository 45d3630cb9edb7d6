// Minimal SVG heatmap emitter for the conditional-bias landscape, with an
// optional scatter overlay of realized (k_fin, f_fin) points.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace iqae {

struct HeatCell {
  double x = 0.0;      // k_fin
  double y = 0.0;      // f_fin
  double value = 0.0;  // b_tilde; NaN renders white
};

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string svg_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Linear two-sided map: negative values toward blue, positive toward red,
// zero and NaN white.
inline std::string heat_color(double value, double vmax) {
  if (std::isnan(value) || vmax <= 0.0) return "#ffffff";
  const double t = std::clamp(value / vmax, -1.0, 1.0);
  int r = 255, g = 255, b = 255;
  if (t >= 0.0) {
    g = b = static_cast<int>(std::lround(255.0 * (1.0 - t)));
  } else {
    r = g = static_cast<int>(std::lround(255.0 * (1.0 + t)));
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

// Cell edges at midpoints between consecutive distinct coordinates; the two
// outer edges mirror the first/last spacing.
inline std::vector<double> cell_edges(const std::vector<double>& centers) {
  std::vector<double> edges(centers.size() + 1);
  if (centers.size() == 1) {
    const double half = centers[0] == 0.0 ? 0.5 : std::abs(centers[0]) * 0.05 + 0.5;
    edges[0] = centers[0] - half;
    edges[1] = centers[0] + half;
    return edges;
  }
  for (std::size_t i = 1; i < centers.size(); ++i) {
    edges[i] = 0.5 * (centers[i - 1] + centers[i]);
  }
  edges.front() = centers.front() - (edges[1] - centers.front());
  edges.back() = centers.back() + (centers.back() - edges[centers.size() - 1]);
  return edges;
}

}  // namespace detail

inline std::string render_heatmap_svg(const std::vector<HeatCell>& cells,
                                      const std::vector<ScatterPoint>& points,
                                      const std::string& title = "") {
  constexpr double kWidth = 720.0, kHeight = 520.0;
  constexpr double kLeft = 70.0, kRight = 20.0, kTop = 30.0, kBottom = 50.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::vector<double> xs, ys;
  for (const HeatCell& c : cells) {
    xs.push_back(c.x);
    ys.push_back(c.y);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  const std::vector<double> xe = detail::cell_edges(xs);
  const std::vector<double> ye = detail::cell_edges(ys);
  const double x_min = xe.front(), x_max = xe.back();
  const double y_min = ye.front(), y_max = ye.back();

  double vmax = 0.0;
  for (const HeatCell& c : cells) {
    if (!std::isnan(c.value)) vmax = std::max(vmax, std::abs(c.value));
  }

  auto to_px_x = [&](double x) {
    return kLeft + (x - x_min) / (x_max - x_min) * plot_w;
  };
  auto to_px_y = [&](double y) {
    return kTop + (y_max - y) / (y_max - y_min) * plot_h;
  };
  auto edge_index = [](const std::vector<double>& centers, double v) {
    const auto it = std::lower_bound(centers.begin(), centers.end(), v);
    return static_cast<std::size_t>(it - centers.begin());
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         detail::svg_num(kWidth) + "\" height=\"" + detail::svg_num(kHeight) +
         "\" viewBox=\"0 0 " + detail::svg_num(kWidth) + " " +
         detail::svg_num(kHeight) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + detail::svg_num(kWidth) +
         "\" height=\"" + detail::svg_num(kHeight) + "\" fill=\"#ffffff\"/>\n";
  if (!title.empty()) {
    svg += "<text x=\"" + detail::svg_num(kWidth / 2) +
           "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
           "font-family=\"sans-serif\">" + title + "</text>\n";
  }

  for (const HeatCell& c : cells) {
    const std::size_t ix = edge_index(xs, c.x);
    const std::size_t iy = edge_index(ys, c.y);
    const double px0 = to_px_x(xe[ix]);
    const double px1 = to_px_x(xe[ix + 1]);
    const double py0 = to_px_y(ye[iy + 1]);
    const double py1 = to_px_y(ye[iy]);
    svg += "<rect x=\"" + detail::svg_num(px0) + "\" y=\"" +
           detail::svg_num(py0) + "\" width=\"" + detail::svg_num(px1 - px0) +
           "\" height=\"" + detail::svg_num(py1 - py0) + "\" fill=\"" +
           detail::heat_color(c.value, vmax) + "\"/>\n";
  }

  for (const ScatterPoint& p : points) {
    if (p.x < x_min || p.x > x_max || p.y < y_min || p.y > y_max) continue;
    svg += "<circle cx=\"" + detail::svg_num(to_px_x(p.x)) + "\" cy=\"" +
           detail::svg_num(to_px_y(p.y)) +
           "\" r=\"2\" fill=\"#000000\" fill-opacity=\"0.35\"/>\n";
  }

  // frame and axis labels
  svg += "<rect x=\"" + detail::svg_num(kLeft) + "\" y=\"" +
         detail::svg_num(kTop) + "\" width=\"" + detail::svg_num(plot_w) +
         "\" height=\"" + detail::svg_num(plot_h) +
         "\" fill=\"none\" stroke=\"#000000\"/>\n";
  svg += "<text x=\"" + detail::svg_num(kLeft + plot_w / 2) + "\" y=\"" +
         detail::svg_num(kHeight - 12) +
         "\" text-anchor=\"middle\" font-size=\"12\" "
         "font-family=\"sans-serif\">k_fin</text>\n";
  svg += "<text x=\"16\" y=\"" + detail::svg_num(kTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" "
         "font-family=\"sans-serif\" transform=\"rotate(-90 16 " +
         detail::svg_num(kTop + plot_h / 2) + ")\">f_fin</text>\n";
  svg += "<text x=\"" + detail::svg_num(kLeft) + "\" y=\"" +
         detail::svg_num(kHeight - 32) +
         "\" text-anchor=\"middle\" font-size=\"10\" "
         "font-family=\"sans-serif\">" + detail::svg_label(xs.front()) +
         "</text>\n";
  svg += "<text x=\"" + detail::svg_num(kLeft + plot_w) + "\" y=\"" +
         detail::svg_num(kHeight - 32) +
         "\" text-anchor=\"middle\" font-size=\"10\" "
         "font-family=\"sans-serif\">" + detail::svg_label(xs.back()) +
         "</text>\n";
  svg += "<text x=\"" + detail::svg_num(kLeft - 8) + "\" y=\"" +
         detail::svg_num(to_px_y(ys.front()) + 4) +
         "\" text-anchor=\"end\" font-size=\"10\" "
         "font-family=\"sans-serif\">" + detail::svg_label(ys.front()) +
         "</text>\n";
  svg += "<text x=\"" + detail::svg_num(kLeft - 8) + "\" y=\"" +
         detail::svg_num(to_px_y(ys.back()) + 4) +
         "\" text-anchor=\"end\" font-size=\"10\" "
         "font-family=\"sans-serif\">" + detail::svg_label(ys.back()) +
         "</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace iqae
