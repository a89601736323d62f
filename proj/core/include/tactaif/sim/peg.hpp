#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tactaif/image.hpp"

namespace tactaif::sim {

enum class Footprint { rectangle, circle, ellipse, annulus, rounded_rectangle };

/// Simulated peg: physical width (sets the insertion tolerance) plus the
/// contact footprint drawn on the tactile sensor. The circle footprint takes
/// a flat chamfer and the annulus a keyway notch so that in-plane rotation
/// stays observable, the way real D-bores and pulley keyways read on a
/// contact patch.
struct PegSpec {
  std::string name = "rectangle";
  Footprint footprint = Footprint::rectangle;
  double width_mm = 8.0;

  int image_width = TactileImage::kDefaultWidth;
  int image_height = TactileImage::kDefaultHeight;
  double extent_x_px = 36.0;  // footprint bounding extent along its long axis
  double extent_y_px = 14.0;
  double corner_radius_px = 4.0;   // rounded_rectangle
  double inner_ratio = 0.5;        // annulus inner/outer radius
  double chamfer_ratio = 0.0;      // circle: flat cut at x = ratio * radius; 0 = none
  double keyway_halfwidth_px = 0.0;  // annulus notch; 0 = none

  /// Width of the intensity ramp at the footprint boundary, in pixels. Large
  /// values read as an indistinct border (round or worn pegs).
  double edge_softness_px = 1.0;

  /// Speckle level in [0, 1]; models a noisy contact-area estimate.
  double surface_noise = 0.0;

  /// Correlation length of the speckle in pixels. Coarse grains read as the
  /// blotchy contamination of a rough-surface contact estimate.
  double noise_grain_px = 6.0;
};

/// Named presets for the five experimental pegs: "shaft", "pulley",
/// "cylinder", "cuboid", "elliptical". Throws on unknown names.
PegSpec peg_preset(std::string_view name);

const std::vector<std::string>& peg_preset_names();

/// Renders the footprint rotated by tilt_deg about the image center, applies
/// seeded zero-mean boundary speckle scaled by surface_noise, clamps to
/// [0, 1]. Deterministic per (spec, tilt, seed).
TactileImage render_tactile(const PegSpec& peg, double tilt_deg, std::uint64_t noise_seed);

}  // namespace tactaif::sim
