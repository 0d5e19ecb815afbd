#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "partpq/core.hpp"
#include "partpq/png_io.hpp"

namespace partpq {

namespace detail {

inline void hsv_to_rgb(double h, double s, double v, uint8_t rgb[3]) {
  const double c = v * s;
  const double hp = h * 6.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (int(hp) % 6) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
  }
  const double m = v - c;
  rgb[0] = uint8_t(std::lround((r + m) * 255.0));
  rgb[1] = uint8_t(std::lround((g + m) * 255.0));
  rgb[2] = uint8_t(std::lround((b + m) * 255.0));
}

}  // namespace detail

// Deterministic per-(sid, pid) color: golden-ratio hue from the class id,
// part id varies value/saturation. Void is black.
inline void palette_color(uint16_t sid, uint16_t pid, uint8_t rgb[3]) {
  if (sid == kVoidClass) {
    rgb[0] = rgb[1] = rgb[2] = 0;
    return;
  }
  const double hue = std::fmod(0.61803398875 * sid, 1.0);
  const double sat = pid == kNoPart ? 0.55 : 0.55 + 0.45 * std::fmod(0.38196601125 * pid, 1.0);
  const double val = pid == kNoPart ? 0.85 : 0.55 + 0.40 * std::fmod(0.7548776662 * pid, 1.0);
  detail::hsv_to_rgb(hue, sat, val, rgb);
}

// Renders a label map to RGB with white contours on instance boundaries.
inline std::vector<uint8_t> colorize(const LabelMap& map) {
  std::vector<uint8_t> rgb(size_t(map.size()) * 3);
  for (int64_t i = 0; i < map.size(); ++i)
    palette_color(map.pixels[i].sid, map.pixels[i].pid, rgb.data() + i * 3);
  auto differs = [&](const LabelTriple& a, const LabelTriple& b) {
    return a.sid != b.sid || a.iid != b.iid;
  };
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const LabelTriple& t = map.at(x, y);
      if (t.is_void()) continue;
      const bool edge = (x + 1 < map.width && differs(t, map.at(x + 1, y))) ||
                        (y + 1 < map.height && differs(t, map.at(x, y + 1))) ||
                        (x > 0 && differs(t, map.at(x - 1, y))) ||
                        (y > 0 && differs(t, map.at(x, y - 1)));
      if (edge && t.has_instance()) {
        const int64_t i = map.index(x, y);
        rgb[i * 3] = rgb[i * 3 + 1] = rgb[i * 3 + 2] = 255;
      }
    }
  }
  return rgb;
}

inline void write_colorized(const LabelMap& map, const std::string& path) {
  write_png_rgb8(path, map.width, map.height, colorize(map));
}

}  // namespace partpq
