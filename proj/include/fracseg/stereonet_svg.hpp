#pragma once

#include <cstdio>
#include <span>
#include <string>

#include "fracseg/orientation.hpp"

namespace fracseg {

/// Lower-hemisphere equal-area pole scatter as a standalone SVG 1.1 document.
/// Pole coordinates are taken from `region.pole` (unit net) and scaled to the
/// drawing radius. North is up.
inline std::string render_pole_svg(std::span<const FractureRegion> regions, int size = 400) {
  const double c = size / 2.0;
  const double r = size * 0.45;
  std::string s;
  char buf[256];
  auto put = [&](const char* fmt, auto... args) {
    if constexpr (sizeof...(args) == 0) {
      s += fmt;
    } else {
      std::snprintf(buf, sizeof buf, fmt, args...);
      s += buf;
    }
  };
  put("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
  put("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\">\n",
      size, size, size, size);
  put("  <title>Fracture poles, lower hemisphere, equal area (%zu)</title>\n", regions.size());
  put("  <rect x=\"0\" y=\"0\" width=\"%d\" height=\"%d\" fill=\"white\"/>\n", size, size);
  put("  <circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n", c, c, r);
  put("  <line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"black\"/>\n", c, c - r, c, c - r - 8);
  put("  <line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"black\"/>\n", c + r, c, c + r + 8, c);
  put("  <line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"black\"/>\n", c, c + r, c, c + r + 8);
  put("  <line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"black\"/>\n", c - r, c, c - r - 8, c);
  put("  <line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"#999\" stroke-width=\"0.5\"/>\n", c - 4, c, c + 4, c);
  put("  <line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"#999\" stroke-width=\"0.5\"/>\n", c, c - 4, c, c + 4);
  put("  <g font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">\n");
  put("    <text x=\"%.3f\" y=\"%.3f\">N</text>\n", c, c - r - 11);
  put("    <text x=\"%.3f\" y=\"%.3f\">E</text>\n", c + r + 15, c + 4);
  put("    <text x=\"%.3f\" y=\"%.3f\">S</text>\n", c, c + r + 22);
  put("    <text x=\"%.3f\" y=\"%.3f\">W</text>\n", c - r - 15, c + 4);
  put("  </g>\n");
  put("  <g fill=\"#c0392b\" stroke=\"black\" stroke-width=\"0.5\">\n");
  for (const FractureRegion& reg : regions) {
    put("    <circle cx=\"%.3f\" cy=\"%.3f\" r=\"3\"><title>region %d: %.1f/%.1f</title></circle>\n",
        c + reg.pole.px * r, c - reg.pole.py * r, reg.id, reg.dip_direction, reg.dip);
  }
  put("  </g>\n");
  put("</svg>\n");
  return s;
}

}  // namespace fracseg
