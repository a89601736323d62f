#include <doctest.h>

#include <filesystem>

#include "tactaif/nn/grad_check.hpp"
#include "tactaif/nn/network.hpp"

using namespace tactaif;
using nn::Activation;
using nn::LayerSpec;
using nn::Mode;
using nn::Network;
using nn::Tensor;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
  Tensor t(std::move(shape));
  Rng rng(seed);
  for (double& x : t.v) x = rng.uniform(-1.0, 1.0);
  return t;
}

}  // namespace

TEST_CASE("forward of a zero-weight network is the bias through activations") {
  Network net({LayerSpec::fully_connected(3, 2), LayerSpec::activation(Activation::sigmoid)}, {3},
              1);
  auto params = net.param_tensors();
  params[0]->fill(0.0);
  (*params[1])[0] = 0.3;
  (*params[1])[1] = -0.7;
  const Tensor out = net.forward_eval(random_tensor({3}, 9));
  CHECK(out[0] == doctest::Approx(1.0 / (1.0 + std::exp(-0.3))));
  CHECK(out[1] == doctest::Approx(1.0 / (1.0 + std::exp(0.7))));
}

TEST_CASE("identity weights pass the input through") {
  Network net({LayerSpec::fully_connected(3, 3)}, {3}, 2);
  auto params = net.param_tensors();
  params[0]->fill(0.0);
  for (int i = 0; i < 3; ++i) params[0]->v[static_cast<std::size_t>(i) * 3 + i] = 1.0;
  params[1]->fill(0.0);
  const Tensor in = random_tensor({3}, 5);
  const Tensor out = net.forward_eval(in);
  for (int i = 0; i < 3; ++i) CHECK(out[static_cast<std::size_t>(i)] == in[static_cast<std::size_t>(i)]);
}

TEST_CASE("eval mode forward is deterministic") {
  Network net({LayerSpec::fully_connected(4, 8), LayerSpec::activation(Activation::relu),
               LayerSpec::dropout(0.5), LayerSpec::fully_connected(8, 2)},
              {4}, 3);
  const Tensor in = random_tensor({4}, 11);
  const Tensor a = net.forward_eval(in);
  const Tensor b = net.forward_eval(in);
  CHECK(a.v == b.v);
}

TEST_CASE("train-mode dropout masks and rescales deterministically per seed") {
  Network net({LayerSpec::dropout(0.4)}, {1000}, 4);
  Tensor in({1000});
  in.fill(1.0);
  Rng rng1(42), rng2(42);
  nn::NetworkCache cache;
  const Tensor a = net.forward(in, Mode::train, &rng1, &cache);
  const Tensor b = net.forward(in, Mode::train, &rng2, nullptr);
  CHECK(a.v == b.v);
  int zeros = 0;
  for (double x : a.v) {
    if (x == 0.0) {
      ++zeros;
    } else {
      CHECK(x == doctest::Approx(1.0 / 0.6));
    }
  }
  CHECK(zeros > 300);
  CHECK(zeros < 500);
  // Training forward without an rng is a usage error.
  CHECK_THROWS_AS(net.forward(in, Mode::train, nullptr, nullptr), nn::UsageError);
}

TEST_CASE("backward with zero output gradient yields zero gradients") {
  Network net({LayerSpec::fully_connected(4, 6), LayerSpec::activation(Activation::relu),
               LayerSpec::fully_connected(6, 3)},
              {4}, 5);
  nn::NetworkCache cache;
  net.forward(random_tensor({4}, 6), Mode::eval, nullptr, &cache);
  const auto grads = net.backward(cache, Tensor({3}));
  for (const Tensor& g : grads.params) {
    for (double x : g.v) CHECK(x == 0.0);
  }
  for (double x : grads.input.v) CHECK(x == 0.0);
}

TEST_CASE("linear layer backward is the transposed weight action") {
  Network net({LayerSpec::fully_connected(3, 2)}, {3}, 7);
  const Tensor in = random_tensor({3}, 8);
  nn::NetworkCache cache;
  net.forward(in, Mode::eval, nullptr, &cache);
  Tensor d_out({2}, {0.5, -1.25});
  const auto grads = net.backward(cache, d_out);
  const Tensor& w = *net.param_tensors()[0];
  for (std::size_t i = 0; i < 3; ++i) {
    const double expect = w.v[0 * 3 + i] * 0.5 + w.v[1 * 3 + i] * -1.25;
    CHECK(grads.input[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("two-layer backward equals composing per-layer results") {
  Network stacked({LayerSpec::fully_connected(3, 4), LayerSpec::activation(Activation::sigmoid)},
                  {3}, 21);
  Network first({LayerSpec::fully_connected(3, 4)}, {3}, 0);
  Network second({LayerSpec::activation(Activation::sigmoid)}, {4}, 0);
  // Copy the stacked weights into the single-layer networks.
  first.param_tensors()[0]->v = stacked.param_tensors()[0]->v;
  first.param_tensors()[1]->v = stacked.param_tensors()[1]->v;

  const Tensor in = random_tensor({3}, 22);
  nn::NetworkCache c_all, c1, c2;
  const Tensor out_all = stacked.forward(in, Mode::eval, nullptr, &c_all);
  const Tensor mid = first.forward(in, Mode::eval, nullptr, &c1);
  const Tensor out = second.forward(mid, Mode::eval, nullptr, &c2);
  CHECK(out_all.v == out.v);

  const Tensor d_out = random_tensor({4}, 23);
  const auto g_all = stacked.backward(c_all, d_out);
  const auto g2 = second.backward(c2, d_out);
  const auto g1 = first.backward(c1, g2.input);
  CHECK(g_all.input.v == g1.input.v);
  CHECK(g_all.params[0].v == g1.params[0].v);
  CHECK(g_all.params[1].v == g1.params[1].v);
}

TEST_CASE("sgd closed forms") {
  SUBCASE("zero gradients leave parameters unchanged") {
    Network net({LayerSpec::fully_connected(2, 2)}, {2}, 9);
    const auto before = net.param_tensors()[0]->v;
    std::vector<Tensor> grads{Tensor({2, 2}), Tensor({2})};
    nn::sgd_step(net, grads, 0.5);
    CHECK(net.param_tensors()[0]->v == before);
  }
  SUBCASE("zero learning rate leaves parameters unchanged") {
    Network net({LayerSpec::fully_connected(2, 2)}, {2}, 9);
    const auto before = net.param_tensors()[0]->v;
    std::vector<Tensor> grads{random_tensor({2, 2}, 1), random_tensor({2}, 2)};
    nn::sgd_step(net, grads, 0.0);
    CHECK(net.param_tensors()[0]->v == before);
  }
  SUBCASE("one step on f(w) = w^2 from w = 1 with lr 0.1 gives 0.8") {
    Tensor w({1}, {1.0});
    Tensor g({1}, {2.0});  // df/dw at w=1
    std::vector<Tensor*> params{&w};
    nn::sgd_step(params, {g}, 0.1);
    CHECK(w[0] == doctest::Approx(0.8));
  }
}

TEST_CASE("gradient check per layer kind (quick pass)") {
  struct Case {
    std::vector<LayerSpec> specs;
    std::vector<std::size_t> shape;
    Mode mode;
  };
  const std::vector<Case> cases = {
      {{LayerSpec::fully_connected(5, 4)}, {5}, Mode::eval},
      {{LayerSpec::conv2d(2, 3, 3, 1, 1)}, {2, 5, 6}, Mode::eval},
      {{LayerSpec::conv2d(2, 2, 5, 2, 2)}, {2, 8, 9}, Mode::eval},
      {{LayerSpec::transposed_conv2d(2, 2, 4, 2, 1)}, {2, 4, 5}, Mode::eval},
      {{LayerSpec::transposed_conv2d(3, 1, 3, 1, 0)}, {3, 4, 4}, Mode::eval},
      {{LayerSpec::fully_connected(4, 6), LayerSpec::dropout(0.3),
        LayerSpec::fully_connected(6, 2)},
       {4},
       Mode::train},
      {{LayerSpec::fully_connected(5, 5), LayerSpec::activation(Activation::relu)},
       {5},
       Mode::eval},
      {{LayerSpec::fully_connected(5, 5), LayerSpec::activation(Activation::sigmoid)},
       {5},
       Mode::eval},
  };
  int idx = 0;
  for (const Case& c : cases) {
    for (std::uint64_t seed : {101u, 202u}) {
      Network net(c.specs, c.shape, derive_seed(seed, static_cast<std::uint64_t>(idx)));
      const Tensor in = random_tensor(c.shape, derive_seed(seed, 99));
      const double err = nn::grad_check(net, in, 1e-4, c.mode, seed);
      CAPTURE(idx);
      CHECK(err < 1e-4);
    }
    ++idx;
  }
}

TEST_CASE("gradient check is exact for a purely linear network") {
  Network net({LayerSpec::fully_connected(4, 3)}, {4}, 31);
  const double err = nn::grad_check(net, random_tensor({4}, 32), 1e-4);
  CHECK(err < 1e-8);
}

TEST_CASE("a corrupted backward is flagged by the checker") {
  Network net({LayerSpec::fully_connected(4, 4), LayerSpec::activation(Activation::sigmoid)},
              {4}, 33);
  const Tensor in = random_tensor({4}, 34);
  auto report = nn::grad_check_report(net, in, 1e-4);
  REQUIRE(report.max_rel_error < 1e-4);

  // Corrupt the largest analytic gradient entry by 5%.
  double* worst = nullptr;
  double mag = -1.0;
  for (Tensor& t : report.analytic.params) {
    for (double& x : t.v) {
      if (std::abs(x) > mag) {
        mag = std::abs(x);
        worst = &x;
      }
    }
  }
  REQUIRE(worst != nullptr);
  *worst *= 1.05;
  const double err = nn::max_relative_error(report.analytic.params, report.analytic.input,
                                            report.numeric_params, report.numeric_input);
  CHECK(err > 1e-2);
}

TEST_CASE("forward tangent agrees with backward through inner products") {
  Network net({LayerSpec::fully_connected(3, 12), LayerSpec::activation(Activation::relu),
               LayerSpec::reshape({1, 3, 4}), LayerSpec::transposed_conv2d(1, 2, 4, 2, 1),
               LayerSpec::activation(Activation::sigmoid)},
              {3}, 44);
  const Tensor in = random_tensor({3}, 45);
  const Tensor v = random_tensor({3}, 46);
  const Tensor r = random_tensor(net.output_shape(), 47);

  const auto [out, jvp] = net.forward_tangent(in, v);
  nn::NetworkCache cache;
  const Tensor out2 = net.forward(in, Mode::eval, nullptr, &cache);
  CHECK(out.v == out2.v);
  const auto grads = net.backward(cache, r);

  // <J v, r> == <v, J^T r>
  const double lhs = nn::dot(jvp, r);
  const double rhs = nn::dot(v, grads.input);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("shape errors name the offending layer") {
  CHECK_THROWS_WITH_AS(Network({LayerSpec::fully_connected(3, 4),
                                LayerSpec::fully_connected(5, 2)},
                               {3}, 1),
                       doctest::Contains("layer 1"), nn::ShapeError);
  Network net({LayerSpec::fully_connected(3, 4)}, {3}, 1);
  CHECK_THROWS_AS(net.forward_eval(Tensor({2})), nn::ShapeError);
}

TEST_CASE("stale caches are rejected") {
  Network a({LayerSpec::fully_connected(3, 3)}, {3}, 1);
  Network b({LayerSpec::fully_connected(3, 3)}, {3}, 2);
  nn::NetworkCache cache;
  a.forward(random_tensor({3}, 3), Mode::eval, nullptr, &cache);
  CHECK_THROWS_AS(b.backward(cache, Tensor({3})), nn::UsageError);
}

TEST_CASE("checkpoint round trip is bit exact") {
  const auto path = std::filesystem::temp_directory_path() / "tactaif_test_net.ckpt";
  Network net({LayerSpec::fully_connected(3, 24), LayerSpec::activation(Activation::relu),
               LayerSpec::dropout(0.1), LayerSpec::reshape({2, 3, 4}),
               LayerSpec::conv2d(2, 2, 3, 1, 1), LayerSpec::activation(Activation::sigmoid)},
              {3}, 77);
  net.save(path);
  const Network back = Network::load(path);
  CHECK(back.init_seed() == net.init_seed());
  CHECK(back.input_shape() == net.input_shape());
  CHECK(back.output_shape() == net.output_shape());
  auto pa = net.param_tensors();
  auto pb = back.param_tensors();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i]->shape == pb[i]->shape);
    CHECK(pa[i]->v == pb[i]->v);
  }
  std::filesystem::remove(path);
}

TEST_CASE("identical seeds give identical initializations") {
  Network a({LayerSpec::conv2d(2, 4, 3, 1, 1)}, {2, 6, 6}, 123);
  Network b({LayerSpec::conv2d(2, 4, 3, 1, 1)}, {2, 6, 6}, 123);
  CHECK(a.param_tensors()[0]->v == b.param_tensors()[0]->v);
}
