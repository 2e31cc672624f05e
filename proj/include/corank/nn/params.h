#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "corank/nn/tensor.h"

namespace corank::nn {

// A named trainable tensor together with its gradient and Adam moments.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor m;  // first moment
  Tensor u;  // second moment
  bool trainable = true;
};

// Owns all parameters of a model. Pointers returned by create/find stay
// valid for the lifetime of the store. Iteration order is creation order,
// which keeps checkpoints and updates deterministic.
class ParamStore {
 public:
  Param& create(const std::string& name, const std::vector<int>& shape);
  Param& create_glorot(const std::string& name, const std::vector<int>& shape, std::mt19937_64& rng);
  Param* find(const std::string& name);
  Param& get(const std::string& name);
  const std::vector<std::unique_ptr<Param>>& all() const { return items_; }
  size_t size() const { return items_.size(); }
  void zero_grads();

 private:
  std::vector<std::unique_ptr<Param>> items_;
};

// Uniform init on [-limit, limit] with limit = sqrt(6 / (fan_in + fan_out)).
void glorot_init(Tensor& t, std::mt19937_64& rng);

}  // namespace corank::nn
