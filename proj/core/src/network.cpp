#include "tactaif/nn/network.hpp"

#include <atomic>
#include <cstring>
#include <fstream>

namespace tactaif::nn {

namespace {

std::uint64_t next_network_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

}  // namespace

Network::Network(std::vector<LayerSpec> specs, std::vector<std::size_t> input_shape,
                 std::uint64_t init_seed)
    : specs_(std::move(specs)),
      input_shape_(std::move(input_shape)),
      init_seed_(init_seed),
      id_(next_network_id()) {
  layers_.reserve(specs_.size());
  Rng rng(init_seed_);
  std::vector<std::size_t> shape = input_shape_;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    auto layer = make_layer(specs_[i]);
    try {
      shape = layer->output_shape(shape);
    } catch (const ShapeError& e) {
      throw ShapeError("layer " + std::to_string(i) + ": " + e.what());
    }
    layer->init_params(rng);
    layers_.push_back(std::move(layer));
  }
  output_shape_ = shape;
}

Tensor Network::forward(const Tensor& in, Mode mode, Rng* dropout_rng,
                        NetworkCache* cache) const {
  if (in.shape != input_shape_) {
    throw ShapeError("network input has shape " + Tensor::shape_string(in.shape) +
                     ", expected " + Tensor::shape_string(input_shape_));
  }
  if (cache) {
    cache->net_id = id_;
    cache->mode = mode;
    cache->layers.assign(layers_.size(), LayerCache{});
  }
  LayerCache scratch;
  Tensor x = in;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    LayerCache& c = cache ? cache->layers[i] : scratch;
    x = layers_[i]->forward(x, mode, dropout_rng, c);
  }
  return x;
}

Tensor Network::forward_eval(const Tensor& in) const {
  return forward(in, Mode::eval, nullptr, nullptr);
}

Network::Gradients Network::backward(const NetworkCache& cache, const Tensor& d_out) const {
  if (cache.net_id != id_ || cache.layers.size() != layers_.size()) {
    throw UsageError("backward: cache does not belong to this network");
  }
  if (d_out.shape != output_shape_) {
    throw ShapeError("backward: output gradient has shape " +
                     Tensor::shape_string(d_out.shape) + ", expected " +
                     Tensor::shape_string(output_shape_));
  }
  Gradients g;
  std::vector<std::vector<Tensor>> per_layer(layers_.size());
  Tensor grad = d_out;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    grad = layers_[i]->backward(cache.layers[i], grad, per_layer[i]);
  }
  g.input = std::move(grad);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (Tensor& t : per_layer[i]) g.params.push_back(std::move(t));
  }
  return g;
}

std::pair<Tensor, Tensor> Network::forward_tangent(const Tensor& in,
                                                   const Tensor& tangent) const {
  if (in.shape != input_shape_) {
    throw ShapeError("forward_tangent: input has shape " + Tensor::shape_string(in.shape) +
                     ", expected " + Tensor::shape_string(input_shape_));
  }
  if (!tangent.same_shape(in)) {
    throw ShapeError("forward_tangent: tangent shape does not match input");
  }
  Tensor x = in;
  Tensor t = tangent;
  for (const auto& layer : layers_) {
    auto [nx, nt] = layer->forward_tangent(x, t);
    x = std::move(nx);
    t = std::move(nt);
  }
  return {std::move(x), std::move(t)};
}

std::vector<Tensor*> Network::param_tensors() {
  std::vector<Tensor*> out;
  for (auto& layer : layers_) {
    for (Tensor& t : layer->params()) out.push_back(&t);
  }
  return out;
}

std::vector<const Tensor*> Network::param_tensors() const {
  std::vector<const Tensor*> out;
  for (const auto& layer : layers_) {
    for (const Tensor& t : layer->params()) out.push_back(&t);
  }
  return out;
}

std::size_t Network::param_scalar_count() const {
  std::size_t n = 0;
  for (const Tensor* t : param_tensors()) n += t->size();
  return n;
}

Network Network::clone() const {
  Network copy(specs_, input_shape_, init_seed_);
  auto src = param_tensors();
  auto dst = copy.param_tensors();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i]->v = src[i]->v;
  return copy;
}

void sgd_step(std::vector<Tensor*> params, const std::vector<Tensor>& gradients,
              double learning_rate) {
  if (params.size() != gradients.size()) {
    throw UsageError("sgd_step: parameter/gradient count mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = gradients[i];
    if (!p.same_shape(g)) {
      throw ShapeError("sgd_step: gradient shape mismatch at tensor " + std::to_string(i));
    }
    for (std::size_t j = 0; j < p.size(); ++j) p[j] -= learning_rate * g[j];
  }
}

void sgd_step(Network& net, const std::vector<Tensor>& gradients, double learning_rate) {
  sgd_step(net.param_tensors(), gradients, learning_rate);
}

// ---------------------------------------------------------------------------
// Checkpoint format: little-endian binary, magic "TACTNN01". Doubles are
// written raw, so a save/load round trip is bit-exact.

namespace {

constexpr char kMagic[8] = {'T', 'A', 'C', 'T', 'N', 'N', '0', '1'};

void put_u64(std::ostream& os, std::uint64_t x) {
  os.write(reinterpret_cast<const char*>(&x), sizeof(x));
}

void put_f64(std::ostream& os, double x) {
  os.write(reinterpret_cast<const char*>(&x), sizeof(x));
}

std::uint64_t get_u64(std::istream& is) {
  std::uint64_t x = 0;
  is.read(reinterpret_cast<char*>(&x), sizeof(x));
  return x;
}

double get_f64(std::istream& is) {
  double x = 0;
  is.read(reinterpret_cast<char*>(&x), sizeof(x));
  return x;
}

void put_shape(std::ostream& os, const std::vector<std::size_t>& s) {
  put_u64(os, s.size());
  for (std::size_t d : s) put_u64(os, d);
}

std::vector<std::size_t> get_shape(std::istream& is) {
  const std::uint64_t n = get_u64(is);
  if (n > 8) {
    throw UsageError("checkpoint: implausible shape rank");
  }
  std::vector<std::size_t> s(n);
  for (auto& d : s) d = get_u64(is);
  return s;
}

}  // namespace

void Network::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw UsageError("checkpoint: cannot open " + path.string() + " for writing");
  }
  save(os);
  if (!os) {
    throw UsageError("checkpoint: write failed for " + path.string());
  }
}

void Network::save(std::ostream& os) const {
  os.write(kMagic, sizeof(kMagic));
  put_u64(os, init_seed_);
  put_shape(os, input_shape_);
  put_u64(os, specs_.size());
  for (const LayerSpec& s : specs_) {
    put_u64(os, static_cast<std::uint64_t>(s.kind));
    put_u64(os, s.in_dim);
    put_u64(os, s.out_dim);
    put_u64(os, s.in_channels);
    put_u64(os, s.out_channels);
    put_u64(os, s.kernel);
    put_u64(os, s.stride);
    put_u64(os, s.padding);
    put_f64(os, s.rate);
    put_u64(os, static_cast<std::uint64_t>(s.act));
    put_shape(os, s.target_shape);
  }
  auto params = param_tensors();
  put_u64(os, params.size());
  for (const Tensor* t : params) {
    put_shape(os, t->shape);
    for (double x : t->v) put_f64(os, x);
  }
  if (!os) {
    throw UsageError("checkpoint: stream write failed");
  }
}

Network Network::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw UsageError("checkpoint: cannot open " + path.string());
  }
  return load(is);
}

Network Network::load(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw UsageError("checkpoint: bad magic");
  }
  const std::uint64_t seed = get_u64(is);
  const auto input_shape = get_shape(is);
  const std::uint64_t n_layers = get_u64(is);
  if (n_layers > 1000) {
    throw UsageError("checkpoint: implausible layer count");
  }
  std::vector<LayerSpec> specs(n_layers);
  for (LayerSpec& s : specs) {
    s.kind = static_cast<LayerSpec::Kind>(get_u64(is));
    s.in_dim = get_u64(is);
    s.out_dim = get_u64(is);
    s.in_channels = get_u64(is);
    s.out_channels = get_u64(is);
    s.kernel = get_u64(is);
    s.stride = get_u64(is);
    s.padding = get_u64(is);
    s.rate = get_f64(is);
    s.act = static_cast<Activation>(get_u64(is));
    s.target_shape = get_shape(is);
  }
  Network net(std::move(specs), input_shape, seed);
  auto params = net.param_tensors();
  const std::uint64_t n_params = get_u64(is);
  if (n_params != params.size()) {
    throw UsageError("checkpoint: parameter tensor count mismatch");
  }
  for (Tensor* t : params) {
    const auto shape = get_shape(is);
    if (shape != t->shape) {
      throw UsageError("checkpoint: parameter shape mismatch");
    }
    for (double& x : t->v) x = get_f64(is);
  }
  if (!is) {
    throw UsageError("checkpoint: truncated stream");
  }
  return net;
}

}  // namespace tactaif::nn
