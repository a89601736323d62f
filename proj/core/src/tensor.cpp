#include "tactaif/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tactaif::nn {

std::size_t Tensor::shape_product(const std::vector<std::size_t>& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}

std::string Tensor::shape_string(const std::vector<std::size_t>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
  v.assign(shape_product(shape), 0.0);
}

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> values)
    : shape(std::move(s)), v(std::move(values)) {
  if (v.size() != shape_product(shape)) {
    throw std::invalid_argument("Tensor: value buffer length " + std::to_string(v.size()) +
                                " does not match shape " + shape_string(shape));
  }
}

void Tensor::fill(double x) { std::fill(v.begin(), v.end(), x); }

bool Tensor::all_finite() const {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double dot(const Tensor& a, const Tensor& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot: size mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.v[i] * b.v[i];
  return acc;
}

}  // namespace tactaif::nn
