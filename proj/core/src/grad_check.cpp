#include "tactaif/nn/grad_check.hpp"

#include <cmath>
#include <stdexcept>

namespace tactaif::nn {

namespace {

constexpr double kDenomFloor = 1e-4;

double rel_error(double a, double n) {
  const double denom = std::max({std::abs(a), std::abs(n), kDenomFloor});
  return std::abs(a - n) / denom;
}

}  // namespace

double max_relative_error(const std::vector<Tensor>& analytic_params,
                          const Tensor& analytic_input,
                          const std::vector<Tensor>& numeric_params,
                          const Tensor& numeric_input, std::string* worst) {
  if (analytic_params.size() != numeric_params.size()) {
    throw UsageError("max_relative_error: gradient set size mismatch");
  }
  double max_err = 0.0;
  std::string where = "none";
  for (std::size_t t = 0; t < analytic_params.size(); ++t) {
    for (std::size_t i = 0; i < analytic_params[t].size(); ++i) {
      const double e = rel_error(analytic_params[t][i], numeric_params[t][i]);
      if (e > max_err) {
        max_err = e;
        where = "param tensor " + std::to_string(t) + " index " + std::to_string(i);
      }
    }
  }
  for (std::size_t i = 0; i < analytic_input.size(); ++i) {
    const double e = rel_error(analytic_input[i], numeric_input[i]);
    if (e > max_err) {
      max_err = e;
      where = "input index " + std::to_string(i);
    }
  }
  if (worst) *worst = where;
  return max_err;
}

GradCheckReport grad_check_report(Network& net, const Tensor& input, double epsilon, Mode mode,
                                  std::uint64_t rng_seed) {
  if (!(epsilon > 0.0)) {
    throw UsageError("grad_check: epsilon must be positive");
  }

  // Fixed projection onto a scalar objective.
  Tensor projection(net.output_shape());
  {
    Rng rng(derive_seed(rng_seed, 17));
    for (double& x : projection.v) x = rng.uniform(-1.0, 1.0);
  }

  const auto objective = [&](const Tensor& in) {
    Rng rng(rng_seed);  // re-seeded per call so dropout masks are identical
    const Tensor out = net.forward(in, mode, &rng, nullptr);
    return dot(out, projection);
  };

  GradCheckReport report;
  {
    Rng rng(rng_seed);
    NetworkCache cache;
    net.forward(input, mode, &rng, &cache);
    report.analytic = net.backward(cache, projection);
  }

  auto params = net.param_tensors();
  report.numeric_params.reserve(params.size());
  for (Tensor* p : params) {
    Tensor grad(p->shape);
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double saved = p->v[i];
      p->v[i] = saved + epsilon;
      const double plus = objective(input);
      p->v[i] = saved - epsilon;
      const double minus = objective(input);
      p->v[i] = saved;
      grad[i] = (plus - minus) / (2.0 * epsilon);
    }
    report.numeric_params.push_back(std::move(grad));
  }

  Tensor in = input;
  report.numeric_input = Tensor(input.shape);
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double saved = in[i];
    in.v[i] = saved + epsilon;
    const double plus = objective(in);
    in.v[i] = saved - epsilon;
    const double minus = objective(in);
    in.v[i] = saved;
    report.numeric_input[i] = (plus - minus) / (2.0 * epsilon);
  }

  report.max_rel_error =
      max_relative_error(report.analytic.params, report.analytic.input, report.numeric_params,
                         report.numeric_input, &report.worst_location);
  return report;
}

double grad_check(Network& net, const Tensor& input, double epsilon, Mode mode,
                  std::uint64_t rng_seed) {
  return grad_check_report(net, input, epsilon, mode, rng_seed).max_rel_error;
}

}  // namespace tactaif::nn
