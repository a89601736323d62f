#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "tactaif/nn/layers.hpp"
#include "tactaif/nn/tensor.hpp"
#include "tactaif/rng.hpp"

namespace tactaif::nn {

/// Intermediates of one forward pass, consumed by backward. Only valid for
/// the network instance that produced it.
struct NetworkCache {
  std::uint64_t net_id = 0;
  Mode mode = Mode::eval;
  std::vector<LayerCache> layers;
};

/// A feed-forward stack of layers with explicit forward, backward and
/// forward-tangent passes. Parameters are initialized deterministically from
/// the construction seed.
class Network {
 public:
  Network(std::vector<LayerSpec> specs, std::vector<std::size_t> input_shape,
          std::uint64_t init_seed);

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;
  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  const std::vector<LayerSpec>& specs() const { return specs_; }
  const std::vector<std::size_t>& input_shape() const { return input_shape_; }
  const std::vector<std::size_t>& output_shape() const { return output_shape_; }
  std::uint64_t init_seed() const { return init_seed_; }
  std::uint64_t id() const { return id_; }

  /// `dropout_rng` is required in train mode when any dropout layer has a
  /// positive rate; `cache` may be null when no backward pass will follow.
  Tensor forward(const Tensor& in, Mode mode, Rng* dropout_rng, NetworkCache* cache) const;
  Tensor forward_eval(const Tensor& in) const;

  struct Gradients {
    std::vector<Tensor> params;  // aligned with param_tensors()
    Tensor input;
  };

  /// Propagates d_out back through the cached pass. Throws UsageError if the
  /// cache did not come from this network.
  Gradients backward(const NetworkCache& cache, const Tensor& d_out) const;

  /// Eval-mode output together with the directional derivative of the output
  /// along `tangent` (a Jacobian-vector product).
  std::pair<Tensor, Tensor> forward_tangent(const Tensor& in, const Tensor& tangent) const;

  std::vector<Tensor*> param_tensors();
  std::vector<const Tensor*> param_tensors() const;
  std::size_t param_scalar_count() const;

  /// Rebuilds an identical network (same specs, seed and parameter values).
  Network clone() const;

  void save(const std::filesystem::path& path) const;
  void save(std::ostream& os) const;
  static Network load(const std::filesystem::path& path);
  static Network load(std::istream& is);

 private:
  std::vector<LayerSpec> specs_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<std::size_t> input_shape_;
  std::vector<std::size_t> output_shape_;
  std::uint64_t init_seed_ = 0;
  std::uint64_t id_ = 0;
};

/// params <- params - learning_rate * gradients
void sgd_step(Network& net, const std::vector<Tensor>& gradients, double learning_rate);
void sgd_step(std::vector<Tensor*> params, const std::vector<Tensor>& gradients,
              double learning_rate);

}  // namespace tactaif::nn
