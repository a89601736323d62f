#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tactaif::nn {

/// Dense row-major tensor of doubles. Shape product always equals the value
/// buffer length.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> v;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s);
  Tensor(std::vector<std::size_t> s, std::vector<double> values);

  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  void fill(double x);
  bool all_finite() const;

  static std::size_t shape_product(const std::vector<std::size_t>& s);
  static std::string shape_string(const std::vector<std::size_t>& s);
};

double dot(const Tensor& a, const Tensor& b);

}  // namespace tactaif::nn
