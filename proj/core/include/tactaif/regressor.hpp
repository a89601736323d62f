#pragma once

#include <cstdint>
#include <vector>

#include "tactaif/decoder.hpp"
#include "tactaif/image.hpp"
#include "tactaif/nn/network.hpp"

namespace tactaif {

/// Supervised CNN tilt regressor, the comparison method for the perception
/// experiment. Image in, scalar tilt out.
class RegressorModel {
 public:
  RegressorModel(nn::Network net, int width, int height, double tilt_scale_deg);

  int width() const { return width_; }
  int height() const { return height_; }
  const nn::Network& network() const { return net_; }

  /// Predicted tilt in degrees.
  double predict_tilt(const TactileImage& img) const;

 private:
  nn::Network net_;
  int width_;
  int height_;
  double tilt_scale_deg_;
};

/// conv(1->8, 5x5, s2) -> relu -> conv(8->16, 5x5, s2) -> relu -> fc 64 ->
/// relu -> fc 1. Output is the tilt divided by tilt_scale_deg.
std::vector<nn::LayerSpec> default_regressor_spec(int width, int height);

/// MSE regression on (image, tilt) pairs with per-sample SGD, same epoch
/// budget semantics as the decoder. Deterministic given the seed. The report
/// records the mean squared error (normalized tilt units) per epoch.
std::pair<RegressorModel, TrainReport> train_tilt_regressor(
    const std::vector<LabeledSample>& dataset, int epochs, std::uint64_t seed,
    const TrainOptions& options = {});

/// Flattens an image to the [1, height, width] tensor the regressor expects.
nn::Tensor image_tensor(const TactileImage& img);

}  // namespace tactaif
