#include "tactaif/decoder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace tactaif {

using nn::LayerSpec;
using nn::Tensor;

DecoderModel::DecoderModel(nn::Network net, int width, int height, double tilt_scale_deg)
    : net_(std::move(net)), width_(width), height_(height), tilt_scale_deg_(tilt_scale_deg) {
  const std::vector<std::size_t> want{1, static_cast<std::size_t>(height),
                                      static_cast<std::size_t>(width)};
  if (net_.input_shape() != std::vector<std::size_t>{1}) {
    throw nn::ShapeError("DecoderModel: network input dimension must be exactly 1");
  }
  if (net_.output_shape() != want) {
    throw nn::ShapeError("DecoderModel: network output shape " +
                         Tensor::shape_string(net_.output_shape()) + " does not match image " +
                         Tensor::shape_string(want));
  }
  if (!(tilt_scale_deg_ > 0.0)) {
    throw std::invalid_argument("DecoderModel: tilt scale must be positive");
  }
}

TactileImage DecoderModel::predict(double tilt_deg) const {
  Tensor in({1}, {tilt_deg / tilt_scale_deg_});
  Tensor out = net_.forward_eval(in);
  for (double& p : out.v) p = std::clamp(p, 0.0, 1.0);
  return TactileImage(width_, height_, std::move(out.v));
}

Tensor DecoderModel::tilt_derivative(double tilt_deg) const {
  return predict_with_derivative(tilt_deg).second;
}

std::pair<TactileImage, Tensor> DecoderModel::predict_with_derivative(double tilt_deg) const {
  Tensor in({1}, {tilt_deg / tilt_scale_deg_});
  // Chain rule: the network sees tilt / scale, so the tangent seed is 1/scale.
  Tensor tangent({1}, {1.0 / tilt_scale_deg_});
  auto [value, d] = net_.forward_tangent(in, tangent);
  for (double& p : value.v) p = std::clamp(p, 0.0, 1.0);
  d.shape = {static_cast<std::size_t>(height_), static_cast<std::size_t>(width_)};
  return {TactileImage(width_, height_, std::move(value.v)), std::move(d)};
}

std::vector<LayerSpec> default_decoder_spec(int width, int height, double dropout_rate) {
  if (width % 8 != 0 || height % 8 != 0) {
    throw std::invalid_argument("default_decoder_spec: width and height must be divisible by 8");
  }
  const std::size_t h0 = static_cast<std::size_t>(height) / 8;
  const std::size_t w0 = static_cast<std::size_t>(width) / 8;
  const std::size_t c0 = 8;
  std::vector<LayerSpec> specs;
  specs.push_back(LayerSpec::fully_connected(1, 64));
  specs.push_back(LayerSpec::activation(nn::Activation::relu));
  specs.push_back(LayerSpec::fully_connected(64, c0 * h0 * w0));
  specs.push_back(LayerSpec::activation(nn::Activation::relu));
  specs.push_back(LayerSpec::dropout(dropout_rate));
  specs.push_back(LayerSpec::reshape({c0, h0, w0}));
  specs.push_back(LayerSpec::transposed_conv2d(c0, 8, 4, 2, 1));
  specs.push_back(LayerSpec::activation(nn::Activation::relu));
  specs.push_back(LayerSpec::conv2d(8, 8, 3, 1, 1));
  specs.push_back(LayerSpec::activation(nn::Activation::relu));
  specs.push_back(LayerSpec::transposed_conv2d(8, 4, 4, 2, 1));
  specs.push_back(LayerSpec::activation(nn::Activation::relu));
  specs.push_back(LayerSpec::conv2d(4, 4, 3, 1, 1));
  specs.push_back(LayerSpec::activation(nn::Activation::relu));
  specs.push_back(LayerSpec::transposed_conv2d(4, 1, 4, 2, 1));
  specs.push_back(LayerSpec::activation(nn::Activation::sigmoid));
  return specs;
}

std::pair<DecoderModel, TrainReport> instant_train(const TactileImage& o_init,
                                                   const AugmentConfig& cfg, int epochs,
                                                   std::uint64_t seed,
                                                   const TrainOptions& options) {
  if (epochs < 1) {
    throw std::invalid_argument("instant_train: epochs must be >= 1");
  }
  const auto t0 = std::chrono::steady_clock::now();

  const std::vector<LabeledSample> dataset = augment(o_init, cfg);
  const std::size_t n_pix = o_init.pixel_count();
  const std::vector<std::size_t> img_shape{1, static_cast<std::size_t>(o_init.height()),
                                           static_cast<std::size_t>(o_init.width())};

  nn::Network net(default_decoder_spec(o_init.width(), o_init.height()), {1},
                  derive_seed(seed, 0));
  Rng shuffle_rng(derive_seed(seed, 1));
  Rng dropout_rng(derive_seed(seed, 2));

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainReport report;
  report.epochs = epochs;
  report.epoch_mean_loss.reserve(static_cast<std::size_t>(epochs));

  nn::NetworkCache cache;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    // Fisher-Yates with our own rng so runs replay exactly.
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);
    }
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const LabeledSample& sample = dataset[idx];
      Tensor in({1}, {sample.tilt_deg / options.tilt_scale_deg});
      Tensor out = net.forward(in, nn::Mode::train, &dropout_rng, &cache);
      Tensor d_out(img_shape);
      double sse = 0.0;
      const std::vector<double>& target = sample.image.pixels();
      for (std::size_t i = 0; i < n_pix; ++i) {
        const double r = out[i] - target[i];
        sse += r * r;
        d_out[i] = 2.0 * r / static_cast<double>(n_pix);
      }
      loss_sum += sse / static_cast<double>(n_pix);
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
  return {DecoderModel(std::move(net), o_init.width(), o_init.height(), options.tilt_scale_deg),
          std::move(report)};
}

// ---------------------------------------------------------------------------

namespace {
constexpr char kDecoderMagic[8] = {'T', 'A', 'C', 'T', 'D', 'E', 'C', '1'};
}

void DecoderModel::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("DecoderModel::save: cannot open " + path.string());
  }
  os.write(kDecoderMagic, sizeof(kDecoderMagic));
  const std::int64_t w = width_, h = height_;
  os.write(reinterpret_cast<const char*>(&w), sizeof(w));
  os.write(reinterpret_cast<const char*>(&h), sizeof(h));
  os.write(reinterpret_cast<const char*>(&tilt_scale_deg_), sizeof(tilt_scale_deg_));
  net_.save(os);
}

DecoderModel DecoderModel::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw std::runtime_error("DecoderModel::load: cannot open " + path.string());
  }
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kDecoderMagic, sizeof(kDecoderMagic)) != 0) {
    throw std::runtime_error("DecoderModel::load: bad magic in " + path.string());
  }
  std::int64_t w = 0, h = 0;
  double scale = 0;
  is.read(reinterpret_cast<char*>(&w), sizeof(w));
  is.read(reinterpret_cast<char*>(&h), sizeof(h));
  is.read(reinterpret_cast<char*>(&scale), sizeof(scale));
  if (!is) {
    throw std::runtime_error("DecoderModel::load: truncated header in " + path.string());
  }
  nn::Network net = nn::Network::load(is);
  return DecoderModel(std::move(net), static_cast<int>(w), static_cast<int>(h), scale);
}

}  // namespace tactaif
