#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "fastcpd/errors.hpp"
#include "fastcpd/metrics.hpp"
#include "fastcpd/pointset.hpp"

// Self-contained deterministic SVG emitters: identical input bytes in,
// identical output bytes out (all numbers formatted with fixed precision).

namespace fastcpd::svg {

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct AxisMap {
  double lo, hi, p0, p1;
  double operator()(double v) const {
    if (hi <= lo) return (p0 + p1) / 2.0;
    return p0 + (v - lo) / (hi - lo) * (p1 - p0);
  }
};

inline const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                      "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace detail

/// Scatter overlay of scene (circles) and transformed model (crosses).
/// D >= 3 gets one panel per adjacent axis pair projection.
inline std::string scatter_overlay(const PointSet& model,
                                   const PointSet& scene) {
  const Eigen::Index d = std::max(model.dim(), scene.dim());
  const int panels = d <= 2 ? 1 : static_cast<int>(d);
  const double panel_w = 320, panel_h = 320, margin = 20;
  const double width = panels * panel_w, height = panel_h;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
       detail::fmt(width) + "\" height=\"" + detail::fmt(height) + "\">\n";
  for (int p = 0; p < panels; ++p) {
    const Eigen::Index ax = p % d;
    const Eigen::Index ay = (p + 1) % d;
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const PointSet* ps : {&model, &scene}) {
      if (ps->count() == 0) continue;
      lo_x = std::min(lo_x, ps->pts.col(ax).minCoeff());
      hi_x = std::max(hi_x, ps->pts.col(ax).maxCoeff());
      lo_y = std::min(lo_y, ps->pts.col(ay).minCoeff());
      hi_y = std::max(hi_y, ps->pts.col(ay).maxCoeff());
    }
    detail::AxisMap mx{lo_x, hi_x, p * panel_w + margin, p * panel_w + panel_w - margin};
    detail::AxisMap my{lo_y, hi_y, panel_h - margin, margin};  // y flipped
    for (Eigen::Index i = 0; i < scene.count(); ++i)
      s += "<circle cx=\"" + detail::fmt(mx(scene.pts(i, ax))) + "\" cy=\"" +
           detail::fmt(my(scene.pts(i, ay))) +
           "\" r=\"2\" fill=\"none\" stroke=\"#1f77b4\"/>\n";
    for (Eigen::Index i = 0; i < model.count(); ++i) {
      const std::string cx = detail::fmt(mx(model.pts(i, ax)));
      const std::string cy = detail::fmt(my(model.pts(i, ay)));
      s += "<path d=\"M " + cx + " " + cy +
           " m -2 -2 l 4 4 m 0 -4 l -4 4\" stroke=\"#d62728\" fill=\"none\"/>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

/// Log-log t_iter vs M chart, one polyline per variant, axes labeled.
inline std::string bench_plot(const std::vector<BenchRecord>& records) {
  const double width = 480, height = 360, ml = 60, mr = 20, mt = 20, mb = 50;

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  for (const auto& r : records) {
    if (r.failed || r.m <= 0 || r.timing.t_iter <= 0.0) continue;
    const double x = std::log10(static_cast<double>(r.m));
    const double y = std::log10(r.timing.t_iter);
    series[to_string(r.variant)].push_back({x, y});
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  }

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
       detail::fmt(width) + "\" height=\"" + detail::fmt(height) + "\">\n";
  s += "<rect x=\"" + detail::fmt(ml) + "\" y=\"" + detail::fmt(mt) +
       "\" width=\"" + detail::fmt(width - ml - mr) + "\" height=\"" +
       detail::fmt(height - mt - mb) +
       "\" fill=\"none\" stroke=\"#000000\"/>\n";
  s += "<text x=\"" + detail::fmt(width / 2) + "\" y=\"" +
       detail::fmt(height - 10) +
       "\" text-anchor=\"middle\" font-size=\"14\">M (log scale)</text>\n";
  s += "<text x=\"15\" y=\"" + detail::fmt(height / 2) +
       "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 15 " +
       detail::fmt(height / 2) +
       ")\">t_iter seconds (log scale)</text>\n";

  detail::AxisMap mx{lo_x, hi_x, ml, width - mr};
  detail::AxisMap my{lo_y, hi_y, height - mb, mt};
  int color = 0;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    std::string d;
    for (std::size_t i = 0; i < pts.size(); ++i)
      d += (i ? " L " : "M ") + detail::fmt(mx(pts[i].first)) + " " +
           detail::fmt(my(pts[i].second));
    const char* col = detail::kSeriesColors[color % 6];
    ++color;
    s += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + col +
         "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + detail::fmt(width - mr - 5) + "\" y=\"" +
         detail::fmt(mt + 15.0 * color) +
         "\" text-anchor=\"end\" font-size=\"12\" fill=\"" + col + "\">" +
         name + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

inline void write_file(const std::string& content, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write SVG: " + path);
  out << content;
  if (!out) throw IoError("SVG write failed: " + path);
}

}  // namespace fastcpd::svg
