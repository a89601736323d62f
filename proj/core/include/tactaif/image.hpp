#pragma once

#include <cstdint>
#include <vector>

namespace tactaif {

/// Fixed-size grayscale contact-area image. Pixels are row-major doubles in
/// [0, 1]; dimensions are immutable after construction.
class TactileImage {
 public:
  static constexpr int kDefaultWidth = 64;
  static constexpr int kDefaultHeight = 48;

  TactileImage(int width, int height);
  TactileImage(int width, int height, std::vector<double> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return pixels_.size(); }

  double at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  void set(int x, int y, double v) { pixels_[static_cast<std::size_t>(y) * width_ + x] = v; }

  const std::vector<double>& pixels() const { return pixels_; }
  std::vector<double>& pixels() { return pixels_; }

  bool same_dims(const TactileImage& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  /// Sum of all pixel intensities.
  double mass() const;

 private:
  int width_;
  int height_;
  std::vector<double> pixels_;
};

/// Mean absolute per-pixel difference. Images must have equal dimensions.
double mean_abs_diff(const TactileImage& a, const TactileImage& b);

/// Rotates the image content about the image center by angle_deg
/// (counter-clockwise with the y axis pointing up), bilinear interpolation,
/// zero fill outside the source. Output is clamped to [0, 1].
TactileImage rotate(const TactileImage& img, double angle_deg);

struct LabeledSample {
  TactileImage image;
  double tilt_deg = 0.0;
};

struct AugmentConfig {
  int count = 500;
  double tilt_min_deg = -20.0;
  double tilt_max_deg = 20.0;
  std::uint64_t rng_seed = 0;
};

/// Self-data augmentation: builds `cfg.count` labeled samples by rotating a
/// single straight-pose image by tilts drawn uniformly from the configured
/// range. Pure given the seed.
std::vector<LabeledSample> augment(const TactileImage& o_init, const AugmentConfig& cfg);

}  // namespace tactaif
