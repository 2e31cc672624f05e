#include "corank/nn/params.h"

#include <cmath>
#include <stdexcept>

namespace corank::nn {

void glorot_init(Tensor& t, std::mt19937_64& rng) {
  int fan_in, fan_out;
  if (t.ndim() == 2) {
    fan_out = t.shape[0];
    fan_in = t.shape[1];
  } else {
    fan_in = fan_out = t.size();
  }
  double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& x : t.v) x = dist(rng);
}

Param& ParamStore::create(const std::string& name, const std::vector<int>& shape) {
  if (find(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  auto p = std::make_unique<Param>();
  p->name = name;
  p->value = Tensor::zeros(shape);
  p->grad = Tensor::zeros(shape);
  p->m = Tensor::zeros(shape);
  p->u = Tensor::zeros(shape);
  items_.push_back(std::move(p));
  return *items_.back();
}

Param& ParamStore::create_glorot(const std::string& name, const std::vector<int>& shape,
                                 std::mt19937_64& rng) {
  Param& p = create(name, shape);
  glorot_init(p.value, rng);
  return p;
}

Param* ParamStore::find(const std::string& name) {
  for (auto& p : items_)
    if (p->name == name) return p.get();
  return nullptr;
}

Param& ParamStore::get(const std::string& name) {
  Param* p = find(name);
  if (!p) throw std::out_of_range("unknown parameter: " + name);
  return *p;
}

void ParamStore::zero_grads() {
  for (auto& p : items_) p->grad.v.assign(p->grad.v.size(), 0.0);
}

}  // namespace corank::nn
