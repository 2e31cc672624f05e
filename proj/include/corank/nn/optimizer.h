#pragma once

#include <string>
#include <vector>

#include "corank/nn/params.h"

namespace corank::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double decay_rate = 0.999;
  int decay_frequency = 100;
};

// Adam with a stepwise learning-rate decay: every decay_frequency steps the
// current rate is multiplied by decay_rate. Parameters whose gradient is
// entirely zero this step are left untouched (their moments do not decay),
// so an update with all-zero gradients is a no-op. Parameters with a
// non-finite gradient are skipped and reported by name.
class Adam {
 public:
  explicit Adam(AdamConfig cfg) : cfg_(cfg), lr_(cfg.lr) {}

  // Applies one update from the gradients in `ps`; returns the names of
  // parameters skipped because of NaN/Inf gradients.
  std::vector<std::string> step(ParamStore& ps);

  long steps_taken() const { return step_; }
  double learning_rate() const { return lr_; }
  const AdamConfig& config() const { return cfg_; }

  // Checkpoint plumbing.
  void restore(long step, double lr) { step_ = step; lr_ = lr; }

 private:
  AdamConfig cfg_;
  long step_ = 0;
  double lr_;
};

}  // namespace corank::nn
