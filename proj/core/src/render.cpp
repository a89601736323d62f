#include "tactaif/sim/peg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tactaif/rng.hpp"

namespace tactaif::sim {

namespace {

double sdf_rectangle(double x, double y, double ax, double ay) {
  const double qx = std::abs(x) - ax;
  const double qy = std::abs(y) - ay;
  const double ox = std::max(qx, 0.0);
  const double oy = std::max(qy, 0.0);
  return std::sqrt(ox * ox + oy * oy) + std::min(std::max(qx, qy), 0.0);
}

// First-order ellipse distance: (f - 1) / |grad f| with f the normalized
// radius. Exact on circles, close enough for edge shading elsewhere.
double sdf_ellipse(double x, double y, double a, double b) {
  const double f = std::sqrt((x / a) * (x / a) + (y / b) * (y / b));
  if (f < 1e-9) return -std::min(a, b);
  const double gx = x / (a * a);
  const double gy = y / (b * b);
  const double grad = std::sqrt(gx * gx + gy * gy) / f;
  return (f - 1.0) / std::max(grad, 1e-9);
}

double footprint_sdf(const PegSpec& peg, double x, double y) {
  switch (peg.footprint) {
    case Footprint::rectangle:
      return sdf_rectangle(x, y, 0.5 * peg.extent_x_px, 0.5 * peg.extent_y_px);
    case Footprint::rounded_rectangle: {
      const double r = peg.corner_radius_px;
      return sdf_rectangle(x, y, 0.5 * peg.extent_x_px - r, 0.5 * peg.extent_y_px - r) - r;
    }
    case Footprint::ellipse:
      return sdf_ellipse(x, y, 0.5 * peg.extent_x_px, 0.5 * peg.extent_y_px);
    case Footprint::circle: {
      const double radius = 0.5 * peg.extent_x_px;
      double d = std::sqrt(x * x + y * y) - radius;
      if (peg.chamfer_ratio > 0.0) {
        d = std::max(d, x - peg.chamfer_ratio * radius);  // flat D-profile cut
      }
      return d;
    }
    case Footprint::annulus: {
      const double outer = 0.5 * peg.extent_x_px;
      const double inner = peg.inner_ratio * outer;
      const double mid = 0.5 * (outer + inner);
      const double half_w = 0.5 * (outer - inner);
      double d = std::abs(std::sqrt(x * x + y * y) - mid) - half_w;
      if (peg.keyway_halfwidth_px > 0.0) {
        // Notch cut out of the ring at angle zero.
        const double key = sdf_rectangle(x - mid, y, half_w * 1.5, peg.keyway_halfwidth_px);
        d = std::max(d, -key);
      }
      return d;
    }
  }
  throw std::invalid_argument("footprint_sdf: unknown footprint");
}

}  // namespace

TactileImage render_tactile(const PegSpec& peg, double tilt_deg, std::uint64_t noise_seed) {
  if (!(peg.width_mm > 0.0)) {
    throw std::invalid_argument("render_tactile: peg width must be positive");
  }
  if (peg.surface_noise < 0.0 || peg.surface_noise > 1.0) {
    throw std::invalid_argument("render_tactile: surface_noise must lie in [0,1]");
  }
  const double a = tilt_deg * std::numbers::pi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  const double cx = 0.5 * (peg.image_width - 1);
  const double cy = 0.5 * (peg.image_height - 1);
  const double soft = std::max(peg.edge_softness_px, 1e-6);

  TactileImage img(peg.image_width, peg.image_height);
  for (int y = 0; y < peg.image_height; ++y) {
    for (int x = 0; x < peg.image_width; ++x) {
      // Same rotation convention as tactaif::rotate, so that
      // render(tilt) == rotate(render(0), tilt) up to resampling.
      const double dx = x - cx;
      const double dy = y - cy;
      const double fx = c * dx - s * dy;
      const double fy = s * dx + c * dy;
      const double d = footprint_sdf(peg, fx, fy);
      img.set(x, y, std::clamp(0.5 - d / soft, 0.0, 1.0));
    }
  }

  if (peg.surface_noise > 0.0) {
    // Correlated zero-mean speckle: a bilinear value-noise field in [-1, 1]
    // with grain-sized cells, scaled by noise * min(v, 1-v). Strongest on the
    // boundary ramp, zero on saturated pixels, never clipped, and blotchy
    // enough that it does not average out at footprint scale.
    const double grain = std::max(peg.noise_grain_px, 1.0);
    const int gw = static_cast<int>(std::ceil(peg.image_width / grain)) + 2;
    const int gh = static_cast<int>(std::ceil(peg.image_height / grain)) + 2;
    std::vector<double> nodes(static_cast<std::size_t>(gw) * gh);
    Rng rng(noise_seed);
    for (double& n : nodes) n = 2.0 * rng.uniform01() - 1.0;
    const auto node = [&](int ix, int iy) {
      return nodes[static_cast<std::size_t>(iy) * gw + ix];
    };
    for (int y = 0; y < peg.image_height; ++y) {
      const double gy = y / grain;
      const int iy = static_cast<int>(gy);
      const double fy = gy - iy;
      for (int x = 0; x < peg.image_width; ++x) {
        const double gx = x / grain;
        const int ix = static_cast<int>(gx);
        const double fx = gx - ix;
        const double field = (1 - fx) * (1 - fy) * node(ix, iy) + fx * (1 - fy) * node(ix + 1, iy) +
                             (1 - fx) * fy * node(ix, iy + 1) + fx * fy * node(ix + 1, iy + 1);
        double& v = img.pixels()[static_cast<std::size_t>(y) * peg.image_width + x];
        const double amp = peg.surface_noise * std::min(v, 1.0 - v);
        v = std::clamp(v + amp * field, 0.0, 1.0);
      }
    }
  }
  return img;
}

const std::vector<std::string>& peg_preset_names() {
  static const std::vector<std::string> names = {"shaft", "pulley", "cylinder", "cuboid",
                                                 "elliptical"};
  return names;
}

PegSpec peg_preset(std::string_view name) {
  PegSpec p;
  p.name = std::string(name);
  if (name == "cuboid") {
    p.footprint = Footprint::rectangle;
    p.extent_x_px = 36.0;
    p.extent_y_px = 14.0;
    p.edge_softness_px = 1.0;
    p.surface_noise = 0.35;
  } else if (name == "shaft") {
    // Polished metal: long thin patch with an indistinct, noisy border.
    p.footprint = Footprint::rounded_rectangle;
    p.extent_x_px = 42.0;
    p.extent_y_px = 10.0;
    p.corner_radius_px = 4.0;
    p.edge_softness_px = 2.2;
    p.surface_noise = 0.5;
    p.noise_grain_px = 8.0;
  } else if (name == "cylinder") {
    p.footprint = Footprint::circle;
    p.extent_x_px = 26.0;
    p.chamfer_ratio = 0.5;
    p.edge_softness_px = 3.0;
    p.surface_noise = 0.45;
    p.noise_grain_px = 8.0;
  } else if (name == "pulley") {
    p.footprint = Footprint::annulus;
    p.extent_x_px = 28.0;
    p.inner_ratio = 0.5;
    p.keyway_halfwidth_px = 2.5;
    p.edge_softness_px = 1.2;
    p.surface_noise = 0.1;
  } else if (name == "elliptical") {
    p.footprint = Footprint::ellipse;
    p.extent_x_px = 34.0;
    p.extent_y_px = 18.0;
    p.edge_softness_px = 1.5;
    p.surface_noise = 0.2;
  } else {
    throw std::invalid_argument("peg_preset: unknown peg '" + std::string(name) + "'");
  }
  return p;
}

}  // namespace tactaif::sim
