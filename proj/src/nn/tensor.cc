#include "corank/nn/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace corank::nn {

int shape_size(const std::vector<int>& s) {
  int n = 1;
  for (int d : s) {
    if (d < 0) throw std::invalid_argument("tensor shape has negative dimension");
    n *= d;
  }
  return n;
}

Tensor::Tensor(std::vector<int> s, std::vector<double> data) : shape(std::move(s)), v(std::move(data)) {
  if (shape_size(shape) != static_cast<int>(v.size()))
    throw std::invalid_argument("tensor data size does not match shape " + shape_str());
}

Tensor Tensor::zeros(const std::vector<int>& s) {
  Tensor t;
  t.shape = s;
  t.v.assign(static_cast<size_t>(shape_size(s)), 0.0);
  return t;
}

Tensor Tensor::scalar(double x) { return Tensor({1}, {x}); }

Tensor Tensor::vec(std::vector<double> x) {
  Tensor t;
  t.shape = {static_cast<int>(x.size())};
  t.v = std::move(x);
  return t;
}

int Tensor::rows() const {
  if (ndim() != 2) throw std::logic_error("rows() on tensor of shape " + shape_str());
  return shape[0];
}

int Tensor::cols() const {
  if (ndim() != 2) throw std::logic_error("cols() on tensor of shape " + shape_str());
  return shape[1];
}

double& Tensor::at(int r, int c) { return v[static_cast<size_t>(r) * shape[1] + c]; }
double Tensor::at(int r, int c) const { return v[static_cast<size_t>(r) * shape[1] + c]; }

bool Tensor::all_finite() const {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << "]";
  return os.str();
}

std::vector<double> softmax_values(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("softmax over empty input");
  double mx = *std::max_element(x.begin(), x.end());
  std::vector<double> out(x.size());
  double z = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - mx);
    z += out[i];
  }
  for (double& o : out) o /= z;
  return out;
}

double logsumexp_values(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("logsumexp over empty input");
  double mx = *std::max_element(x.begin(), x.end());
  double z = 0.0;
  for (double xi : x) z += std::exp(xi - mx);
  return mx + std::log(z);
}

}  // namespace corank::nn
