#include <cmath>
#include <random>

#include "corank/nn/optimizer.h"
#include "doctest.h"

using namespace corank::nn;

namespace {

// the update recursion, written out long-hand for one scalar entry
struct HandAdam {
  double m = 0, u = 0;
  int t = 0;
  double apply(double value, double grad, const AdamConfig& cfg, double lr) {
    ++t;
    m = cfg.beta1 * m + (1 - cfg.beta1) * grad;
    u = cfg.beta2 * u + (1 - cfg.beta2) * grad * grad;
    double mh = m / (1 - std::pow(cfg.beta1, t));
    double uh = u / (1 - std::pow(cfg.beta2, t));
    return value - lr * mh / (std::sqrt(uh) + cfg.eps);
  }
};

}  // namespace

TEST_CASE("adam matches the hand-rolled recursion with bias correction") {
  AdamConfig cfg;
  cfg.lr = 0.1;
  cfg.decay_frequency = 1000;  // keep the rate fixed for this case
  ParamStore ps;
  auto& p = ps.create("p", {2});
  p.value.v = {1.0, -2.0};

  Adam opt(cfg);
  HandAdam h0, h1;
  double v0 = 1.0, v1 = -2.0;
  std::vector<std::vector<double>> grads = {{0.5, -1.0}, {0.2, 0.4}, {-0.3, 0.0}};
  for (const auto& g : grads) {
    p.grad.v = g;
    auto skipped = opt.step(ps);
    CHECK(skipped.empty());
    v0 = h0.apply(v0, g[0], cfg, cfg.lr);
    v1 = h1.apply(v1, g[1], cfg, cfg.lr);
    CHECK(p.value.v[0] == doctest::Approx(v0).epsilon(1e-12));
    CHECK(p.value.v[1] == doctest::Approx(v1).epsilon(1e-12));
  }
  CHECK(opt.steps_taken() == 3);
}

TEST_CASE("learning rate decays on schedule") {
  AdamConfig cfg;
  cfg.lr = 1.0;
  cfg.decay_rate = 0.5;
  cfg.decay_frequency = 2;
  ParamStore ps;
  auto& p = ps.create("p", {1});
  p.value.v = {0.0};

  Adam opt(cfg);
  for (int s = 1; s <= 6; ++s) {
    p.grad.v = {1.0};
    opt.step(ps);
    double want = std::pow(0.5, s / 2);
    CHECK(opt.learning_rate() == doctest::Approx(want));
  }

  // the rate is decayed at the top of the boundary step, so that step's
  // update already uses the smaller value
  ParamStore ps2;
  auto& q = ps2.create("q", {1});
  q.value.v = {3.0};
  Adam opt2(cfg);
  HandAdam h;
  double v = 3.0, lr = cfg.lr;
  for (int s = 1; s <= 4; ++s) {
    if (s % cfg.decay_frequency == 0) lr *= cfg.decay_rate;
    q.grad.v = {0.7};
    opt2.step(ps2);
    v = h.apply(v, 0.7, cfg, lr);
    CHECK(q.value.v[0] == doctest::Approx(v).epsilon(1e-10));
  }
}

TEST_CASE("all-zero gradients leave a parameter and its moments untouched") {
  AdamConfig cfg;
  ParamStore ps;
  auto& a = ps.create("a", {2});
  a.value.v = {1.0, 1.0};
  auto& b = ps.create("b", {2});
  b.value.v = {1.0, 1.0};

  Adam opt(cfg);
  a.grad.v = {0.1, 0.2};
  b.grad.v = {0.0, 0.0};
  opt.step(ps);
  CHECK(a.value.v[0] != 1.0);
  CHECK(b.value.v == std::vector<double>{1.0, 1.0});
  CHECK(b.m.v == std::vector<double>{0.0, 0.0});
  CHECK(b.u.v == std::vector<double>{0.0, 0.0});

  // once b participates, its moments move
  b.grad.v = {0.5, 0.0};
  a.grad.v = {0.0, 0.0};
  opt.step(ps);
  CHECK(b.m.v[0] != 0.0);
  CHECK(opt.steps_taken() == 2);
}

TEST_CASE("non-finite gradients are skipped and reported by name") {
  AdamConfig cfg;
  ParamStore ps;
  auto& good = ps.create("net/good", {1});
  good.value.v = {1.0};
  auto& bad = ps.create("net/bad", {2});
  bad.value.v = {1.0, 1.0};

  Adam opt(cfg);
  good.grad.v = {0.3};
  bad.grad.v = {std::nan(""), 0.0};
  auto skipped = opt.step(ps);
  REQUIRE(skipped.size() == 1);
  CHECK(skipped[0] == "net/bad");
  CHECK(bad.value.v == std::vector<double>{1.0, 1.0});  // untouched
  CHECK(good.value.v[0] != 1.0);                        // still updated

  bad.grad.v = {0.0, INFINITY};
  good.grad.v = {0.0};
  skipped = opt.step(ps);
  CHECK(skipped == std::vector<std::string>{"net/bad"});
}

TEST_CASE("untrainable parameters never move") {
  AdamConfig cfg;
  ParamStore ps;
  auto& frozen = ps.create("frozen", {1});
  frozen.value.v = {2.0};
  frozen.trainable = false;

  Adam opt(cfg);
  frozen.grad.v = {5.0};
  opt.step(ps);
  CHECK(frozen.value.v[0] == 2.0);
}

TEST_CASE("restore resumes the step count and rate") {
  AdamConfig cfg;
  cfg.lr = 1.0;
  cfg.decay_rate = 0.9;
  cfg.decay_frequency = 1;
  Adam opt(cfg);
  opt.restore(7, 0.25);
  CHECK(opt.steps_taken() == 7);
  CHECK(opt.learning_rate() == 0.25);

  ParamStore ps;
  auto& p = ps.create("p", {1});
  p.value.v = {0.0};
  p.grad.v = {1.0};
  opt.step(ps);
  CHECK(opt.steps_taken() == 8);
  CHECK(opt.learning_rate() == doctest::Approx(0.225));
}
