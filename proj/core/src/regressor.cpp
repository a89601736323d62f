#include "tactaif/regressor.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tactaif {

using nn::LayerSpec;
using nn::Tensor;

nn::Tensor image_tensor(const TactileImage& img) {
  return Tensor({1, static_cast<std::size_t>(img.height()), static_cast<std::size_t>(img.width())},
                img.pixels());
}

RegressorModel::RegressorModel(nn::Network net, int width, int height, double tilt_scale_deg)
    : net_(std::move(net)), width_(width), height_(height), tilt_scale_deg_(tilt_scale_deg) {
  if (net_.output_shape() != std::vector<std::size_t>{1}) {
    throw nn::ShapeError("RegressorModel: output dimension must be exactly 1");
  }
}

double RegressorModel::predict_tilt(const TactileImage& img) const {
  if (img.width() != width_ || img.height() != height_) {
    throw nn::ShapeError("RegressorModel: image dimensions do not match the trained model");
  }
  const Tensor out = net_.forward_eval(image_tensor(img));
  return out[0] * tilt_scale_deg_;
}

std::vector<LayerSpec> default_regressor_spec(int width, int height) {
  const auto conv_out = [](int n) { return (n + 2 * 2 - 5) / 2 + 1; };
  const int h2 = conv_out(conv_out(height));
  const int w2 = conv_out(conv_out(width));
  if (h2 <= 0 || w2 <= 0) {
    throw std::invalid_argument("default_regressor_spec: image too small");
  }
  const std::size_t flat = static_cast<std::size_t>(16) * h2 * w2;
  std::vector<LayerSpec> specs;
  specs.push_back(LayerSpec::conv2d(1, 8, 5, 2, 2));
  specs.push_back(LayerSpec::activation(nn::Activation::relu));
  specs.push_back(LayerSpec::conv2d(8, 16, 5, 2, 2));
  specs.push_back(LayerSpec::activation(nn::Activation::relu));
  specs.push_back(LayerSpec::reshape({flat}));
  specs.push_back(LayerSpec::fully_connected(flat, 64));
  specs.push_back(LayerSpec::activation(nn::Activation::relu));
  specs.push_back(LayerSpec::fully_connected(64, 1));
  return specs;
}

std::pair<RegressorModel, TrainReport> train_tilt_regressor(
    const std::vector<LabeledSample>& dataset, int epochs, std::uint64_t seed,
    const TrainOptions& options) {
  if (dataset.empty()) {
    throw std::invalid_argument("train_tilt_regressor: dataset must be non-empty");
  }
  if (epochs < 1) {
    throw std::invalid_argument("train_tilt_regressor: epochs must be >= 1");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const int width = dataset.front().image.width();
  const int height = dataset.front().image.height();

  nn::Network net(default_regressor_spec(width, height),
                  {1, static_cast<std::size_t>(height), static_cast<std::size_t>(width)},
                  derive_seed(seed, 0));
  Rng shuffle_rng(derive_seed(seed, 1));

  std::vector<Tensor> inputs;
  inputs.reserve(dataset.size());
  for (const LabeledSample& s : dataset) inputs.push_back(image_tensor(s.image));

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainReport report;
  report.epochs = epochs;
  nn::NetworkCache cache;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);
    }
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const double target = dataset[idx].tilt_deg / options.tilt_scale_deg;
      Tensor out = net.forward(inputs[idx], nn::Mode::train, nullptr, &cache);
      const double r = out[0] - target;
      loss_sum += r * r;
      Tensor d_out({1}, {2.0 * r});
      auto grads = net.backward(cache, d_out);
      nn::sgd_step(net, grads.params, options.learning_rate);
    }
    const double mean_loss = loss_sum / static_cast<double>(dataset.size());
    if (!std::isfinite(mean_loss)) {
      throw TrainingDivergenceError(epoch + 1, options.learning_rate);
    }
    report.epoch_mean_loss.push_back(mean_loss);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {RegressorModel(std::move(net), width, height, options.tilt_scale_deg),
          std::move(report)};
}

}  // namespace tactaif
