#include "corank/nn/optimizer.h"

#include <cmath>

namespace corank::nn {

std::vector<std::string> Adam::step(ParamStore& ps) {
  ++step_;
  if (cfg_.decay_frequency > 0 && step_ % cfg_.decay_frequency == 0) lr_ *= cfg_.decay_rate;

  double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));

  std::vector<std::string> skipped;
  for (auto& up : ps.all()) {
    Param& p = *up;
    if (!p.trainable) continue;
    if (!p.grad.all_finite()) {
      skipped.push_back(p.name);
      continue;
    }
    bool touched = false;
    for (double g : p.grad.v)
      if (g != 0.0) { touched = true; break; }
    if (!touched) continue;
    for (int i = 0; i < p.value.size(); ++i) {
      double g = p.grad.at(i);
      p.m.at(i) = cfg_.beta1 * p.m.at(i) + (1.0 - cfg_.beta1) * g;
      p.u.at(i) = cfg_.beta2 * p.u.at(i) + (1.0 - cfg_.beta2) * g * g;
      double mhat = p.m.at(i) / bc1;
      double uhat = p.u.at(i) / bc2;
      p.value.at(i) -= lr_ * mhat / (std::sqrt(uhat) + cfg_.eps);
    }
  }
  return skipped;
}

}  // namespace corank::nn
