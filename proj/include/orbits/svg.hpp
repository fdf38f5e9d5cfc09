#pragma once

#include <algorithm>
#include <ostream>
#include <vector>

#include "orbits/format.hpp"
#include "orbits/potentials.hpp"

namespace orbits {

/// Minimal static orbit plot: one polyline in an 800x800 frame with an
/// equal-aspect viewBox fitted to the trajectory extent plus a 5% margin.
/// The y axis is flipped so the plot reads in the usual math orientation.
inline void write_svg_polyline(std::ostream& os, const std::vector<Vec2>& pts) {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  if (!pts.empty()) {
    xmin = xmax = pts.front().x;
    ymin = ymax = -pts.front().y;
    for (const auto& p : pts) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, -p.y);
      ymax = std::max(ymax, -p.y);
    }
  }
  double side = std::max(xmax - xmin, ymax - ymin);
  if (side <= 0.0) side = 1.0;
  const double margin = 0.05 * side;
  const double box = side + 2.0 * margin;
  const double cx = 0.5 * (xmin + xmax);
  const double cy = 0.5 * (ymin + ymax);
  const double ox = cx - 0.5 * box;
  const double oy = cy - 0.5 * box;

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\""
     << format_double(ox) << ' ' << format_double(oy) << ' ' << format_double(box) << ' '
     << format_double(box) << "\">\n";
  os << "<rect x=\"" << format_double(ox) << "\" y=\"" << format_double(oy) << "\" width=\""
     << format_double(box) << "\" height=\"" << format_double(box) << "\" fill=\"white\"/>\n";
  if (pts.size() == 1) {
    os << "<circle cx=\"" << format_double(pts[0].x) << "\" cy=\"" << format_double(-pts[0].y)
       << "\" r=\"" << format_double(box / 200.0) << "\" fill=\"#1f77b4\"/>\n";
  } else if (pts.size() > 1) {
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\""
       << format_double(box / 800.0) << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) os << ' ';
      os << format_double(pts[i].x) << ',' << format_double(-pts[i].y);
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace orbits
