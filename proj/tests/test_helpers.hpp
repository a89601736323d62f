#pragma once

#include <algorithm>
#include <cmath>

#include "tactaif/image.hpp"

namespace testutil {

// Independent rasterizer for an axis-aligned rectangle footprint centered on
// the image: intensity ramps linearly across `soft` pixels at the boundary.
// Written from the distance-to-rectangle definition, not shared with the
// production renderer.
inline tactaif::TactileImage rect_image(int w, int h, double half_x, double half_y,
                                        double soft = 1.0) {
  tactaif::TactileImage img(w, h);
  const double cx = 0.5 * (w - 1);
  const double cy = 0.5 * (h - 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double qx = std::abs(x - cx) - half_x;
      const double qy = std::abs(y - cy) - half_y;
      const double ox = std::max(qx, 0.0);
      const double oy = std::max(qy, 0.0);
      const double d = std::hypot(ox, oy) + std::min(std::max(qx, qy), 0.0);
      img.set(x, y, std::clamp(0.5 - d / soft, 0.0, 1.0));
    }
  }
  return img;
}

// Mean absolute difference restricted to pixels at least `margin` px from
// the border.
inline double interior_mad(const tactaif::TactileImage& a, const tactaif::TactileImage& b,
                           int margin) {
  double acc = 0.0;
  int n = 0;
  for (int y = margin; y < a.height() - margin; ++y) {
    for (int x = margin; x < a.width() - margin; ++x) {
      acc += std::abs(a.at(x, y) - b.at(x, y));
      ++n;
    }
  }
  return acc / n;
}

}  // namespace testutil
