#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tactaif/nn/tensor.hpp"
#include "tactaif/rng.hpp"

namespace tactaif::nn {

enum class Mode { train, eval };
enum class Activation { relu, sigmoid };

/// Shape inconsistency between a tensor and the layer that received it.
class ShapeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// API misuse, e.g. a backward pass fed a cache from a different network.
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Declarative layer description; a Network is built from a chain of these.
struct LayerSpec {
  enum class Kind : std::uint32_t {
    fully_connected,
    conv2d,
    transposed_conv2d,
    dropout,
    activation,
    reshape,
  };

  Kind kind = Kind::fully_connected;
  std::size_t in_dim = 0, out_dim = 0;                      // fully_connected
  std::size_t in_channels = 0, out_channels = 0;            // conv kinds
  std::size_t kernel = 0, stride = 1, padding = 0;          // conv kinds
  double rate = 0.0;                                        // dropout
  Activation act = Activation::relu;                        // activation
  std::vector<std::size_t> target_shape;                    // reshape

  static LayerSpec fully_connected(std::size_t in, std::size_t out);
  static LayerSpec conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
                          std::size_t stride, std::size_t padding);
  static LayerSpec transposed_conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
                                     std::size_t stride, std::size_t padding);
  static LayerSpec dropout(double rate);
  static LayerSpec activation(Activation act);
  static LayerSpec reshape(std::vector<std::size_t> shape);

  std::string describe() const;
};

/// Per-layer forward intermediates kept for the backward pass.
struct LayerCache {
  Tensor input;
  Tensor output;
  std::vector<unsigned char> keep_mask;  // dropout only
};

class Layer {
 public:
  explicit Layer(LayerSpec spec) : spec_(std::move(spec)) {}
  virtual ~Layer() = default;

  const LayerSpec& spec() const { return spec_; }
  std::vector<Tensor>& params() { return params_; }
  const std::vector<Tensor>& params() const { return params_; }

  /// Output shape for the given input shape; throws ShapeError if refused.
  virtual std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const = 0;

  /// Allocates and initializes parameters (uniform fan-in scaling, zero bias).
  virtual void init_params(Rng& rng);

  /// `rng` is consumed only by train-mode dropout.
  virtual Tensor forward(const Tensor& in, Mode mode, Rng* rng, LayerCache& cache) const = 0;

  /// Returns the input gradient; fills `d_params` (aligned with params()).
  virtual Tensor backward(const LayerCache& cache, const Tensor& d_out,
                          std::vector<Tensor>& d_params) const = 0;

  /// Eval-mode value plus directional derivative along `tangent`.
  virtual std::pair<Tensor, Tensor> forward_tangent(const Tensor& in,
                                                    const Tensor& tangent) const = 0;

 protected:
  LayerSpec spec_;
  std::vector<Tensor> params_;
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec);

}  // namespace tactaif::nn
