#include "tactaif/image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tactaif/rng.hpp"

namespace tactaif {

TactileImage::TactileImage(int width, int height)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("TactileImage: dimensions must be positive, got " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
  pixels_.assign(static_cast<std::size_t>(width) * height, 0.0);
}

TactileImage::TactileImage(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("TactileImage: dimensions must be positive");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("TactileImage: pixel buffer length " +
                                std::to_string(pixels_.size()) + " does not match " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
  for (double p : pixels_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("TactileImage: pixel value outside [0,1]: " +
                                  std::to_string(p));
    }
  }
}

double TactileImage::mass() const {
  double m = 0.0;
  for (double p : pixels_) m += p;
  return m;
}

double mean_abs_diff(const TactileImage& a, const TactileImage& b) {
  if (!a.same_dims(b)) {
    throw std::invalid_argument("mean_abs_diff: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    acc += std::abs(a.pixels()[i] - b.pixels()[i]);
  }
  return acc / static_cast<double>(a.pixel_count());
}

namespace {

// Bilinear sample with zero outside the image.
double sample(const TactileImage& img, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  double acc = 0.0;
  for (int dy = 0; dy <= 1; ++dy) {
    const int yy = y0 + dy;
    if (yy < 0 || yy >= img.height()) continue;
    const double wy = dy ? fy : 1.0 - fy;
    for (int dx = 0; dx <= 1; ++dx) {
      const int xx = x0 + dx;
      if (xx < 0 || xx >= img.width()) continue;
      const double wx = dx ? fx : 1.0 - fx;
      acc += wx * wy * img.at(xx, yy);
    }
  }
  return acc;
}

}  // namespace

TactileImage rotate(const TactileImage& img, double angle_deg) {
  if (!std::isfinite(angle_deg)) {
    throw std::invalid_argument("rotate: angle must be finite");
  }
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  const double cx = 0.5 * (img.width() - 1);
  const double cy = 0.5 * (img.height() - 1);

  TactileImage out(img.width(), img.height());
  // Inverse mapping: each destination pixel pulls from the source position
  // rotated the other way. Rows grow downward, so this sign layout gives a
  // counter-clockwise content rotation in y-up coordinates.
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      const double sx = cx + c * dx - s * dy;
      const double sy = cy + s * dx + c * dy;
      out.set(x, y, std::clamp(sample(img, sx, sy), 0.0, 1.0));
    }
  }
  return out;
}

std::vector<LabeledSample> augment(const TactileImage& o_init, const AugmentConfig& cfg) {
  if (cfg.count < 1) {
    throw std::invalid_argument("augment: count must be >= 1");
  }
  if (!(cfg.tilt_min_deg <= cfg.tilt_max_deg)) {
    throw std::invalid_argument("augment: tilt range lower bound must not exceed upper bound");
  }
  Rng rng(cfg.rng_seed);
  std::vector<LabeledSample> out;
  out.reserve(static_cast<std::size_t>(cfg.count));
  for (int i = 0; i < cfg.count; ++i) {
    const double tilt = rng.uniform(cfg.tilt_min_deg, cfg.tilt_max_deg);
    out.push_back(LabeledSample{rotate(o_init, tilt), tilt});
  }
  return out;
}

}  // namespace tactaif
