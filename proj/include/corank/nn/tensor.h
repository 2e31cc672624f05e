#pragma once

#include <string>
#include <vector>

namespace corank::nn {

// Dense row-major tensor of doubles. Rank 0 is represented as shape {1}.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> v;

  Tensor() = default;
  Tensor(std::vector<int> s, std::vector<double> data);

  static Tensor zeros(const std::vector<int>& s);
  static Tensor scalar(double x);
  static Tensor vec(std::vector<double> x);

  int size() const { return static_cast<int>(v.size()); }
  int ndim() const { return static_cast<int>(shape.size()); }
  int rows() const;
  int cols() const;

  double& at(int i) { return v[static_cast<size_t>(i)]; }
  double at(int i) const { return v[static_cast<size_t>(i)]; }
  double& at(int r, int c);
  double at(int r, int c) const;

  bool all_finite() const;
  std::string shape_str() const;
};

int shape_size(const std::vector<int>& s);

// Value-space helpers used both inside the graph ops and by plain
// double code paths (cluster attention, decode-time softmax).
std::vector<double> softmax_values(const std::vector<double>& x);
double logsumexp_values(const std::vector<double>& x);

}  // namespace corank::nn
