#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nply/series.hpp"
#include "nply/targets.hpp"

namespace nply::svg {

struct Curve {
  std::vector<cplx> points;
  std::string label;
  bool closed = true;
};

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return colors[i % 6];
}

}  // namespace detail

/// Static SVG 1.1 overlay of quotient circle images on the target boundary.
/// The view box is fitted to the curves (plus h(0) = 1); the target boundary
/// is clipped to it.
inline std::string render(const std::vector<Curve>& curves, const ConvexTarget& target,
                          const std::string& title, int size_px = 800) {
  double xmin = 1.0, xmax = 1.0, ymin = 0.0, ymax = 0.0;
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) continue;
      xmin = std::min(xmin, p.real());
      xmax = std::max(xmax, p.real());
      ymin = std::min(ymin, p.imag());
      ymax = std::max(ymax, p.imag());
    }
  }
  if (const auto* hp = target.as_half_plane()) {
    xmin = std::min(xmin, hp->alpha);
    xmax = std::max(xmax, hp->alpha);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-3}) * 1.15;
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  const double x0 = cx - span / 2, y0 = cy - span / 2;
  const double scale = size_px / span;
  auto px = [&](cplx w) {
    return detail::fmt((w.real() - x0) * scale) + "," + detail::fmt((y0 + span - w.imag()) * scale);
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << size_px
     << "\" height=\"" << size_px << "\" viewBox=\"0 0 " << size_px << " " << size_px << "\">\n"
     << "  <title>" << title << "</title>\n"
     << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Target region boundary.
  if (const auto* hp = target.as_half_plane()) {
    os << "  <line x1=\"" << px({hp->alpha, y0}).substr(0, px({hp->alpha, y0}).find(','))
       << "\" y1=\"0\" x2=\"" << px({hp->alpha, y0}).substr(0, px({hp->alpha, y0}).find(','))
       << "\" y2=\"" << size_px << "\" stroke=\"black\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n";
  } else {
    os << "  <polygon fill=\"#f0f0f0\" stroke=\"black\" stroke-width=\"2\" points=\"";
    for (const auto& v : target.as_sampled()->polygon.vertices()) os << px(v) << " ";
    os << "\"/>\n";
  }
  // Axes through 0.
  os << "  <line x1=\"0\" y1=\"" << detail::fmt((y0 + span) * scale) << "\" x2=\"" << size_px << "\" y2=\""
     << detail::fmt((y0 + span) * scale) << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    os << "  <" << (c.closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"" << detail::palette(i)
       << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : c.points) os << px(p) << " ";
    os << "\"><title>" << c.label << "</title></" << (c.closed ? "polygon" : "polyline") << ">\n";
  }
  os << "  <circle cx=\"" << px(1.0).substr(0, px(1.0).find(',')) << "\" cy=\""
     << px(1.0).substr(px(1.0).find(',') + 1) << "\" r=\"3\" fill=\"black\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace nply::svg
