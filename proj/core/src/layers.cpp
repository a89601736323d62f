#include "tactaif/nn/layers.hpp"

#include <cmath>

namespace tactaif::nn {

LayerSpec LayerSpec::fully_connected(std::size_t in, std::size_t out) {
  LayerSpec s;
  s.kind = Kind::fully_connected;
  s.in_dim = in;
  s.out_dim = out;
  return s;
}

LayerSpec LayerSpec::conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
                            std::size_t stride, std::size_t padding) {
  LayerSpec s;
  s.kind = Kind::conv2d;
  s.in_channels = in_ch;
  s.out_channels = out_ch;
  s.kernel = kernel;
  s.stride = stride;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::transposed_conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
                                       std::size_t stride, std::size_t padding) {
  LayerSpec s = conv2d(in_ch, out_ch, kernel, stride, padding);
  s.kind = Kind::transposed_conv2d;
  return s;
}

LayerSpec LayerSpec::dropout(double rate) {
  LayerSpec s;
  s.kind = Kind::dropout;
  s.rate = rate;
  return s;
}

LayerSpec LayerSpec::activation(Activation act) {
  LayerSpec s;
  s.kind = Kind::activation;
  s.act = act;
  return s;
}

LayerSpec LayerSpec::reshape(std::vector<std::size_t> shape) {
  LayerSpec s;
  s.kind = Kind::reshape;
  s.target_shape = std::move(shape);
  return s;
}

std::string LayerSpec::describe() const {
  switch (kind) {
    case Kind::fully_connected:
      return "fully_connected(" + std::to_string(in_dim) + "->" + std::to_string(out_dim) + ")";
    case Kind::conv2d:
      return "conv2d(" + std::to_string(in_channels) + "->" + std::to_string(out_channels) +
             ", k" + std::to_string(kernel) + ", s" + std::to_string(stride) + ", p" +
             std::to_string(padding) + ")";
    case Kind::transposed_conv2d:
      return "transposed_conv2d(" + std::to_string(in_channels) + "->" +
             std::to_string(out_channels) + ", k" + std::to_string(kernel) + ", s" +
             std::to_string(stride) + ", p" + std::to_string(padding) + ")";
    case Kind::dropout:
      return "dropout(" + std::to_string(rate) + ")";
    case Kind::activation:
      return act == Activation::relu ? "activation(relu)" : "activation(sigmoid)";
    case Kind::reshape:
      return "reshape(" + Tensor::shape_string(target_shape) + ")";
  }
  return "unknown";
}

void Layer::init_params(Rng&) {}

namespace {

void require_shape(const Tensor& t, const std::vector<std::size_t>& want,
                   const LayerSpec& spec, const char* what) {
  if (t.shape != want) {
    throw ShapeError(spec.describe() + ": " + what + " has shape " +
                     Tensor::shape_string(t.shape) + ", expected " +
                     Tensor::shape_string(want));
  }
}

class FullyConnected : public Layer {
 public:
  using Layer::Layer;

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    if (in != std::vector<std::size_t>{spec_.in_dim}) {
      throw ShapeError(spec_.describe() + ": input shape " + Tensor::shape_string(in) +
                       " does not match fan-in");
    }
    return {spec_.out_dim};
  }

  void init_params(Rng& rng) override {
    const double limit = std::sqrt(6.0 / static_cast<double>(spec_.in_dim));
    Tensor w({spec_.out_dim, spec_.in_dim});
    for (double& x : w.v) x = rng.uniform(-limit, limit);
    Tensor b({spec_.out_dim});
    params_ = {std::move(w), std::move(b)};
  }

  Tensor forward(const Tensor& in, Mode, Rng*, LayerCache& cache) const override {
    require_shape(in, {spec_.in_dim}, spec_, "input");
    const Tensor& w = params_[0];
    const Tensor& b = params_[1];
    Tensor out({spec_.out_dim});
    for (std::size_t o = 0; o < spec_.out_dim; ++o) {
      double acc = b[o];
      const double* wr = &w.v[o * spec_.in_dim];
      for (std::size_t i = 0; i < spec_.in_dim; ++i) acc += wr[i] * in[i];
      out[o] = acc;
    }
    cache.input = in;
    return out;
  }

  Tensor backward(const LayerCache& cache, const Tensor& d_out,
                  std::vector<Tensor>& d_params) const override {
    const Tensor& w = params_[0];
    Tensor dw({spec_.out_dim, spec_.in_dim});
    Tensor db({spec_.out_dim});
    Tensor din({spec_.in_dim});
    for (std::size_t o = 0; o < spec_.out_dim; ++o) {
      const double g = d_out[o];
      db[o] = g;
      const double* wr = &w.v[o * spec_.in_dim];
      double* dwr = &dw.v[o * spec_.in_dim];
      for (std::size_t i = 0; i < spec_.in_dim; ++i) {
        dwr[i] = g * cache.input[i];
        din[i] += g * wr[i];
      }
    }
    d_params = {std::move(dw), std::move(db)};
    return din;
  }

  std::pair<Tensor, Tensor> forward_tangent(const Tensor& in, const Tensor& tan) const override {
    LayerCache scratch;
    Tensor out = forward(in, Mode::eval, nullptr, scratch);
    const Tensor& w = params_[0];
    Tensor tout({spec_.out_dim});
    for (std::size_t o = 0; o < spec_.out_dim; ++o) {
      double acc = 0.0;
      const double* wr = &w.v[o * spec_.in_dim];
      for (std::size_t i = 0; i < spec_.in_dim; ++i) acc += wr[i] * tan[i];
      tout[o] = acc;
    }
    return {std::move(out), std::move(tout)};
  }
};

// Shared shape helpers for the two convolution kinds. Feature maps are
// [channels, height, width].
struct ConvDims {
  std::size_t c_in, h_in, w_in, c_out, h_out, w_out, k, s, p;
};

ConvDims conv_dims(const LayerSpec& spec, const std::vector<std::size_t>& in) {
  if (in.size() != 3 || in[0] != spec.in_channels) {
    throw ShapeError(spec.describe() + ": input shape " + Tensor::shape_string(in) +
                     " is not [channels,height,width] with matching channels");
  }
  ConvDims d{};
  d.c_in = in[0];
  d.h_in = in[1];
  d.w_in = in[2];
  d.c_out = spec.out_channels;
  d.k = spec.kernel;
  d.s = spec.stride;
  d.p = spec.padding;
  if (spec.kind == LayerSpec::Kind::conv2d) {
    if (d.h_in + 2 * d.p < d.k || d.w_in + 2 * d.p < d.k) {
      throw ShapeError(spec.describe() + ": kernel larger than padded input");
    }
    d.h_out = (d.h_in + 2 * d.p - d.k) / d.s + 1;
    d.w_out = (d.w_in + 2 * d.p - d.k) / d.s + 1;
  } else {
    const std::size_t h = (d.h_in - 1) * d.s + d.k;
    const std::size_t w = (d.w_in - 1) * d.s + d.k;
    if (h < 2 * d.p || w < 2 * d.p) {
      throw ShapeError(spec.describe() + ": padding exceeds output extent");
    }
    d.h_out = h - 2 * d.p;
    d.w_out = w - 2 * d.p;
  }
  if (d.h_out == 0 || d.w_out == 0) {
    throw ShapeError(spec.describe() + ": empty output map");
  }
  return d;
}

class Conv2d : public Layer {
 public:
  using Layer::Layer;

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    const ConvDims d = conv_dims(spec_, in);
    return {d.c_out, d.h_out, d.w_out};
  }

  void init_params(Rng& rng) override {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(spec_.in_channels * spec_.kernel * spec_.kernel));
    Tensor w({spec_.out_channels, spec_.in_channels, spec_.kernel, spec_.kernel});
    for (double& x : w.v) x = rng.uniform(-limit, limit);
    Tensor b({spec_.out_channels});
    params_ = {std::move(w), std::move(b)};
  }

  // out[oc,oy,ox] = b[oc] + sum_{ic,ky,kx} W[oc,ic,ky,kx] * in[ic, oy*s-p+ky, ox*s-p+kx]
  Tensor apply(const Tensor& in, const ConvDims& d, bool with_bias) const {
    const Tensor& w = params_[0];
    const Tensor& b = params_[1];
    Tensor out({d.c_out, d.h_out, d.w_out});
    for (std::size_t oc = 0; oc < d.c_out; ++oc) {
      double* out_c = &out.v[oc * d.h_out * d.w_out];
      if (with_bias) {
        for (std::size_t i = 0; i < d.h_out * d.w_out; ++i) out_c[i] = b[oc];
      }
      for (std::size_t ic = 0; ic < d.c_in; ++ic) {
        const double* in_c = &in.v[ic * d.h_in * d.w_in];
        const double* w_cc = &w.v[(oc * d.c_in + ic) * d.k * d.k];
        for (std::size_t oy = 0; oy < d.h_out; ++oy) {
          for (std::size_t ky = 0; ky < d.k; ++ky) {
            const std::ptrdiff_t iy =
                static_cast<std::ptrdiff_t>(oy * d.s + ky) - static_cast<std::ptrdiff_t>(d.p);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(d.h_in)) continue;
            const double* in_row = &in_c[static_cast<std::size_t>(iy) * d.w_in];
            double* out_row = &out_c[oy * d.w_out];
            const double* w_row = &w_cc[ky * d.k];
            for (std::size_t ox = 0; ox < d.w_out; ++ox) {
              double acc = 0.0;
              for (std::size_t kx = 0; kx < d.k; ++kx) {
                const std::ptrdiff_t ix =
                    static_cast<std::ptrdiff_t>(ox * d.s + kx) - static_cast<std::ptrdiff_t>(d.p);
                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(d.w_in)) continue;
                acc += w_row[kx] * in_row[ix];
              }
              out_row[ox] += acc;
            }
          }
        }
      }
    }
    return out;
  }

  Tensor forward(const Tensor& in, Mode, Rng*, LayerCache& cache) const override {
    const ConvDims d = conv_dims(spec_, in.shape);
    cache.input = in;
    return apply(in, d, /*with_bias=*/true);
  }

  Tensor backward(const LayerCache& cache, const Tensor& d_out,
                  std::vector<Tensor>& d_params) const override {
    const ConvDims d = conv_dims(spec_, cache.input.shape);
    require_shape(d_out, {d.c_out, d.h_out, d.w_out}, spec_, "output gradient");
    const Tensor& w = params_[0];
    const Tensor& in = cache.input;
    Tensor dw(w.shape);
    Tensor db({d.c_out});
    Tensor din(in.shape);
    for (std::size_t oc = 0; oc < d.c_out; ++oc) {
      const double* g_c = &d_out.v[oc * d.h_out * d.w_out];
      for (std::size_t i = 0; i < d.h_out * d.w_out; ++i) db[oc] += g_c[i];
      for (std::size_t ic = 0; ic < d.c_in; ++ic) {
        const double* in_c = &in.v[ic * d.h_in * d.w_in];
        double* din_c = &din.v[ic * d.h_in * d.w_in];
        const double* w_cc = &w.v[(oc * d.c_in + ic) * d.k * d.k];
        double* dw_cc = &dw.v[(oc * d.c_in + ic) * d.k * d.k];
        for (std::size_t oy = 0; oy < d.h_out; ++oy) {
          for (std::size_t ky = 0; ky < d.k; ++ky) {
            const std::ptrdiff_t iy =
                static_cast<std::ptrdiff_t>(oy * d.s + ky) - static_cast<std::ptrdiff_t>(d.p);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(d.h_in)) continue;
            const double* in_row = &in_c[static_cast<std::size_t>(iy) * d.w_in];
            double* din_row = &din_c[static_cast<std::size_t>(iy) * d.w_in];
            const double* g_row = &g_c[oy * d.w_out];
            const double* w_row = &w_cc[ky * d.k];
            double* dw_row = &dw_cc[ky * d.k];
            for (std::size_t ox = 0; ox < d.w_out; ++ox) {
              const double g = g_row[ox];
              for (std::size_t kx = 0; kx < d.k; ++kx) {
                const std::ptrdiff_t ix =
                    static_cast<std::ptrdiff_t>(ox * d.s + kx) - static_cast<std::ptrdiff_t>(d.p);
                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(d.w_in)) continue;
                dw_row[kx] += g * in_row[ix];
                din_row[ix] += g * w_row[kx];
              }
            }
          }
        }
      }
    }
    d_params = {std::move(dw), std::move(db)};
    return din;
  }

  std::pair<Tensor, Tensor> forward_tangent(const Tensor& in, const Tensor& tan) const override {
    const ConvDims d = conv_dims(spec_, in.shape);
    Tensor out = apply(in, d, /*with_bias=*/true);
    Tensor tout = apply(tan, d, /*with_bias=*/false);
    return {std::move(out), std::move(tout)};
  }
};

class TransposedConv2d : public Layer {
 public:
  using Layer::Layer;

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    const ConvDims d = conv_dims(spec_, in);
    return {d.c_out, d.h_out, d.w_out};
  }

  void init_params(Rng& rng) override {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(spec_.in_channels * spec_.kernel * spec_.kernel));
    // Weight layout [in_ch, out_ch, k, k], matching the usual deconvolution
    // convention.
    Tensor w({spec_.in_channels, spec_.out_channels, spec_.kernel, spec_.kernel});
    for (double& x : w.v) x = rng.uniform(-limit, limit);
    Tensor b({spec_.out_channels});
    params_ = {std::move(w), std::move(b)};
  }

  // out[oc, iy*s+ky-p, ix*s+kx-p] += W[ic,oc,ky,kx] * in[ic,iy,ix]
  Tensor apply(const Tensor& in, const ConvDims& d, bool with_bias) const {
    const Tensor& w = params_[0];
    const Tensor& b = params_[1];
    Tensor out({d.c_out, d.h_out, d.w_out});
    if (with_bias) {
      for (std::size_t oc = 0; oc < d.c_out; ++oc) {
        double* out_c = &out.v[oc * d.h_out * d.w_out];
        for (std::size_t i = 0; i < d.h_out * d.w_out; ++i) out_c[i] = b[oc];
      }
    }
    for (std::size_t ic = 0; ic < d.c_in; ++ic) {
      const double* in_c = &in.v[ic * d.h_in * d.w_in];
      for (std::size_t oc = 0; oc < d.c_out; ++oc) {
        double* out_c = &out.v[oc * d.h_out * d.w_out];
        const double* w_cc = &w.v[(ic * d.c_out + oc) * d.k * d.k];
        for (std::size_t iy = 0; iy < d.h_in; ++iy) {
          for (std::size_t ky = 0; ky < d.k; ++ky) {
            const std::ptrdiff_t oy =
                static_cast<std::ptrdiff_t>(iy * d.s + ky) - static_cast<std::ptrdiff_t>(d.p);
            if (oy < 0 || oy >= static_cast<std::ptrdiff_t>(d.h_out)) continue;
            const double* in_row = &in_c[iy * d.w_in];
            double* out_row = &out_c[static_cast<std::size_t>(oy) * d.w_out];
            const double* w_row = &w_cc[ky * d.k];
            for (std::size_t ix = 0; ix < d.w_in; ++ix) {
              const double x = in_row[ix];
              if (x == 0.0) continue;
              for (std::size_t kx = 0; kx < d.k; ++kx) {
                const std::ptrdiff_t ox =
                    static_cast<std::ptrdiff_t>(ix * d.s + kx) - static_cast<std::ptrdiff_t>(d.p);
                if (ox < 0 || ox >= static_cast<std::ptrdiff_t>(d.w_out)) continue;
                out_row[ox] += w_row[kx] * x;
              }
            }
          }
        }
      }
    }
    return out;
  }

  Tensor forward(const Tensor& in, Mode, Rng*, LayerCache& cache) const override {
    const ConvDims d = conv_dims(spec_, in.shape);
    cache.input = in;
    return apply(in, d, /*with_bias=*/true);
  }

  Tensor backward(const LayerCache& cache, const Tensor& d_out,
                  std::vector<Tensor>& d_params) const override {
    const ConvDims d = conv_dims(spec_, cache.input.shape);
    require_shape(d_out, {d.c_out, d.h_out, d.w_out}, spec_, "output gradient");
    const Tensor& w = params_[0];
    const Tensor& in = cache.input;
    Tensor dw(w.shape);
    Tensor db({d.c_out});
    Tensor din(in.shape);
    for (std::size_t oc = 0; oc < d.c_out; ++oc) {
      const double* g_c = &d_out.v[oc * d.h_out * d.w_out];
      for (std::size_t i = 0; i < d.h_out * d.w_out; ++i) db[oc] += g_c[i];
    }
    for (std::size_t ic = 0; ic < d.c_in; ++ic) {
      const double* in_c = &in.v[ic * d.h_in * d.w_in];
      double* din_c = &din.v[ic * d.h_in * d.w_in];
      for (std::size_t oc = 0; oc < d.c_out; ++oc) {
        const double* g_c = &d_out.v[oc * d.h_out * d.w_out];
        const double* w_cc = &w.v[(ic * d.c_out + oc) * d.k * d.k];
        double* dw_cc = &dw.v[(ic * d.c_out + oc) * d.k * d.k];
        for (std::size_t iy = 0; iy < d.h_in; ++iy) {
          for (std::size_t ky = 0; ky < d.k; ++ky) {
            const std::ptrdiff_t oy =
                static_cast<std::ptrdiff_t>(iy * d.s + ky) - static_cast<std::ptrdiff_t>(d.p);
            if (oy < 0 || oy >= static_cast<std::ptrdiff_t>(d.h_out)) continue;
            const double* in_row = &in_c[iy * d.w_in];
            double* din_row = &din_c[iy * d.w_in];
            const double* g_row = &g_c[static_cast<std::size_t>(oy) * d.w_out];
            const double* w_row = &w_cc[ky * d.k];
            double* dw_row = &dw_cc[ky * d.k];
            for (std::size_t ix = 0; ix < d.w_in; ++ix) {
              double acc = 0.0;
              for (std::size_t kx = 0; kx < d.k; ++kx) {
                const std::ptrdiff_t ox =
                    static_cast<std::ptrdiff_t>(ix * d.s + kx) - static_cast<std::ptrdiff_t>(d.p);
                if (ox < 0 || ox >= static_cast<std::ptrdiff_t>(d.w_out)) continue;
                const double g = g_row[ox];
                acc += w_row[kx] * g;
                dw_row[kx] += g * in_row[ix];
              }
              din_row[ix] += acc;
            }
          }
        }
      }
    }
    d_params = {std::move(dw), std::move(db)};
    return din;
  }

  std::pair<Tensor, Tensor> forward_tangent(const Tensor& in, const Tensor& tan) const override {
    const ConvDims d = conv_dims(spec_, in.shape);
    Tensor out = apply(in, d, /*with_bias=*/true);
    Tensor tout = apply(tan, d, /*with_bias=*/false);
    return {std::move(out), std::move(tout)};
  }
};

class Dropout : public Layer {
 public:
  using Layer::Layer;

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    return in;
  }

  Tensor forward(const Tensor& in, Mode mode, Rng* rng, LayerCache& cache) const override {
    cache.keep_mask.clear();
    if (mode == Mode::eval || spec_.rate <= 0.0) {
      return in;
    }
    if (rng == nullptr) {
      throw UsageError(spec_.describe() + ": train-mode forward needs an rng");
    }
    // Inverted dropout: kept units are scaled so the eval pass is identity.
    const double keep = 1.0 - spec_.rate;
    Tensor out(in.shape);
    cache.keep_mask.resize(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
      const bool k = rng->uniform01() >= spec_.rate;
      cache.keep_mask[i] = k;
      out[i] = k ? in[i] / keep : 0.0;
    }
    return out;
  }

  Tensor backward(const LayerCache& cache, const Tensor& d_out,
                  std::vector<Tensor>& d_params) const override {
    d_params.clear();
    if (cache.keep_mask.empty()) {
      return d_out;  // eval-mode or rate-0 pass-through
    }
    const double keep = 1.0 - spec_.rate;
    Tensor din(d_out.shape);
    for (std::size_t i = 0; i < d_out.size(); ++i) {
      din[i] = cache.keep_mask[i] ? d_out[i] / keep : 0.0;
    }
    return din;
  }

  std::pair<Tensor, Tensor> forward_tangent(const Tensor& in, const Tensor& tan) const override {
    return {in, tan};
  }
};

class ActivationLayer : public Layer {
 public:
  using Layer::Layer;

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    return in;
  }

  Tensor forward(const Tensor& in, Mode, Rng*, LayerCache& cache) const override {
    Tensor out(in.shape);
    if (spec_.act == Activation::relu) {
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
    } else {
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-in[i]));
    }
    cache.input = in;
    cache.output = out;
    return out;
  }

  Tensor backward(const LayerCache& cache, const Tensor& d_out,
                  std::vector<Tensor>& d_params) const override {
    d_params.clear();
    Tensor din(d_out.shape);
    if (spec_.act == Activation::relu) {
      for (std::size_t i = 0; i < d_out.size(); ++i) {
        din[i] = cache.input[i] > 0.0 ? d_out[i] : 0.0;
      }
    } else {
      for (std::size_t i = 0; i < d_out.size(); ++i) {
        const double y = cache.output[i];
        din[i] = d_out[i] * y * (1.0 - y);
      }
    }
    return din;
  }

  std::pair<Tensor, Tensor> forward_tangent(const Tensor& in, const Tensor& tan) const override {
    Tensor out(in.shape);
    Tensor tout(in.shape);
    if (spec_.act == Activation::relu) {
      for (std::size_t i = 0; i < in.size(); ++i) {
        const bool pos = in[i] > 0.0;
        out[i] = pos ? in[i] : 0.0;
        tout[i] = pos ? tan[i] : 0.0;
      }
    } else {
      for (std::size_t i = 0; i < in.size(); ++i) {
        const double y = 1.0 / (1.0 + std::exp(-in[i]));
        out[i] = y;
        tout[i] = tan[i] * y * (1.0 - y);
      }
    }
    return {std::move(out), std::move(tout)};
  }
};

class Reshape : public Layer {
 public:
  using Layer::Layer;

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    if (Tensor::shape_product(in) != Tensor::shape_product(spec_.target_shape)) {
      throw ShapeError(spec_.describe() + ": cannot reshape " + Tensor::shape_string(in));
    }
    return spec_.target_shape;
  }

  Tensor forward(const Tensor& in, Mode, Rng*, LayerCache& cache) const override {
    cache.input.shape = in.shape;  // original shape only; values not needed
    Tensor out = in;
    out.shape = spec_.target_shape;
    return out;
  }

  Tensor backward(const LayerCache& cache, const Tensor& d_out,
                  std::vector<Tensor>& d_params) const override {
    d_params.clear();
    Tensor din = d_out;
    din.shape = cache.input.shape;
    return din;
  }

  std::pair<Tensor, Tensor> forward_tangent(const Tensor& in, const Tensor& tan) const override {
    Tensor out = in;
    out.shape = spec_.target_shape;
    Tensor tout = tan;
    tout.shape = spec_.target_shape;
    return {std::move(out), std::move(tout)};
  }
};

}  // namespace

std::unique_ptr<Layer> make_layer(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerSpec::Kind::fully_connected:
      if (spec.in_dim == 0 || spec.out_dim == 0) {
        throw ShapeError("fully_connected: zero fan-in or fan-out");
      }
      return std::make_unique<FullyConnected>(spec);
    case LayerSpec::Kind::conv2d:
    case LayerSpec::Kind::transposed_conv2d:
      if (spec.in_channels == 0 || spec.out_channels == 0 || spec.kernel == 0 ||
          spec.stride == 0) {
        throw ShapeError(spec.describe() + ": zero channel count, kernel or stride");
      }
      if (spec.kind == LayerSpec::Kind::conv2d) {
        return std::make_unique<Conv2d>(spec);
      }
      return std::make_unique<TransposedConv2d>(spec);
    case LayerSpec::Kind::dropout:
      if (spec.rate < 0.0 || spec.rate >= 1.0) {
        throw UsageError("dropout: rate must lie in [0,1)");
      }
      return std::make_unique<Dropout>(spec);
    case LayerSpec::Kind::activation:
      return std::make_unique<ActivationLayer>(spec);
    case LayerSpec::Kind::reshape:
      return std::make_unique<Reshape>(spec);
  }
  throw UsageError("make_layer: unknown layer kind");
}

}  // namespace tactaif::nn
