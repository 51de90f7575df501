#pragma once

// Minimal SVG line plot of L against tau_scaled with the bound as a
// horizontal rule.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "optolg/leggett_garg.hpp"

namespace optolg::io {

namespace detail {

inline std::string fmt(const char *spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

} // namespace detail

inline std::string to_svg(const LGCurve &curve, const std::string &title,
                          const std::string &x_label = "tau |G| / 2pi") {
  constexpr double width = 640, height = 400;
  constexpr double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;

  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (!curve.points.empty()) {
    x0 = curve.points.front().tau_scaled;
    x1 = curve.points.back().tau_scaled;
    y0 = y1 = curve.points.front().bound;
    for (const auto &p : curve.points) {
      y0 = std::min({y0, p.l_value, p.bound});
      y1 = std::max({y1, p.l_value, p.bound});
    }
  }
  if (!(x1 > x0))
    x1 = x0 + 1.0;
  const double pad = 0.05 * std::max(y1 - y0, 1e-12);
  y0 -= pad;
  y1 += pad;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
       "viewBox=\"0 0 640 400\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"14\">" + title + "</text>\n";
  // axes
  s += "<line x1=\"" + detail::fmt("%.2f", left) + "\" y1=\"" + detail::fmt("%.2f", top + ph) +
       "\" x2=\"" + detail::fmt("%.2f", left + pw) + "\" y2=\"" + detail::fmt("%.2f", top + ph) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + detail::fmt("%.2f", left) + "\" y1=\"" + detail::fmt("%.2f", top) +
       "\" x2=\"" + detail::fmt("%.2f", left) + "\" y2=\"" + detail::fmt("%.2f", top + ph) +
       "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    s += "<text x=\"" + detail::fmt("%.2f", sx(xv)) + "\" y=\"" +
         detail::fmt("%.2f", top + ph + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
         detail::fmt("%.3g", xv) + "</text>\n";
    s += "<text x=\"" + detail::fmt("%.2f", left - 6) + "\" y=\"" +
         detail::fmt("%.2f", sy(yv) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
         detail::fmt("%.3g", yv) + "</text>\n";
  }
  s += "<text x=\"" + detail::fmt("%.2f", left + pw / 2) + "\" y=\"" +
       detail::fmt("%.2f", height - 10) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + x_label + "</text>\n";
  s += "<text x=\"16\" y=\"" + detail::fmt("%.2f", top + ph / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
       "transform=\"rotate(-90 16 " + detail::fmt("%.2f", top + ph / 2) + ")\">L</text>\n";

  if (!curve.points.empty()) {
    const double b = curve.points.front().bound;
    s += "<line class=\"bound\" x1=\"" + detail::fmt("%.2f", left) + "\" y1=\"" +
         detail::fmt("%.2f", sy(b)) + "\" x2=\"" + detail::fmt("%.2f", left + pw) + "\" y2=\"" +
         detail::fmt("%.2f", sy(b)) + "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
    s += "<polyline class=\"series\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" "
         "points=\"";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      const auto &p = curve.points[i];
      if (i)
        s += ' ';
      s += detail::fmt("%.2f", sx(p.tau_scaled)) + "," + detail::fmt("%.2f", sy(p.l_value));
    }
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

} // namespace optolg::io
