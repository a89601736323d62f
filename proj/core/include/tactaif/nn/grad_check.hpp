#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tactaif/nn/network.hpp"

namespace tactaif::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_location;
  Network::Gradients analytic;
  std::vector<Tensor> numeric_params;
  Tensor numeric_input;
};

/// Guarded relative error between an analytic and a numeric gradient set:
/// |a - n| / max(|a|, |n|, 1e-4), maximized over all entries.
double max_relative_error(const std::vector<Tensor>& analytic_params,
                          const Tensor& analytic_input,
                          const std::vector<Tensor>& numeric_params,
                          const Tensor& numeric_input, std::string* worst = nullptr);

/// Compares the backward pass against central finite differences of the
/// scalar J = sum(output * R) with a seeded random projection R. In train
/// mode every forward re-seeds its dropout rng so the masks are held fixed
/// across perturbations. Parameters are perturbed in place and restored.
GradCheckReport grad_check_report(Network& net, const Tensor& input, double epsilon,
                                  Mode mode = Mode::eval, std::uint64_t rng_seed = 0xC0FFEE);

/// Maximum relative error across all parameters and the input gradient.
double grad_check(Network& net, const Tensor& input, double epsilon, Mode mode = Mode::eval,
                  std::uint64_t rng_seed = 0xC0FFEE);

}  // namespace tactaif::nn
