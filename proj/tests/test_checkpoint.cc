#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "corank/nn/checkpoint.h"
#include "doctest.h"

using namespace corank::nn;

namespace {

std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

struct Cleanup {
  std::vector<std::string> paths;
  ~Cleanup() {
    for (const auto& p : paths) std::remove(p.c_str());
  }
};

}  // namespace

TEST_CASE("checkpoint round-trips values, moments, and optimizer state") {
  std::mt19937_64 rng(9);
  ParamStore ps;
  ps.create_glorot("enc/w", {3, 4}, rng);
  ps.create_glorot("head/b", {5}, rng);
  ps.get("enc/w").m.v[2] = 0.25;
  ps.get("enc/w").u.v[7] = 0.5;
  ps.get("head/b").m.v[0] = -1.0;

  AdamConfig cfg;
  Adam opt(cfg);
  opt.restore(42, 0.0125);

  auto path = temp_path("ckpt_roundtrip.bin");
  Cleanup cleanup{{path, path + ".manifest.txt"}};
  save_checkpoint(path, ps, &opt, "{\"note\":1}");

  ParamStore fresh;
  fresh.create("enc/w", {3, 4});
  fresh.create("head/b", {5});
  Adam opt2(cfg);
  auto meta = load_checkpoint(path, fresh, &opt2);

  CHECK(meta.config_json == "{\"note\":1}");
  CHECK(meta.has_optimizer);
  CHECK(meta.step == 42);
  CHECK(meta.lr == 0.0125);
  CHECK(opt2.steps_taken() == 42);
  CHECK(opt2.learning_rate() == 0.0125);
  CHECK(fresh.get("enc/w").value.v == ps.get("enc/w").value.v);
  CHECK(fresh.get("enc/w").m.v == ps.get("enc/w").m.v);
  CHECK(fresh.get("enc/w").u.v == ps.get("enc/w").u.v);
  CHECK(fresh.get("head/b").m.v[0] == -1.0);

  CHECK(read_checkpoint_config(path) == "{\"note\":1}");

  // manifest names every parameter with its shape
  std::ifstream man(path + ".manifest.txt");
  REQUIRE(man.good());
  std::string text((std::istreambuf_iterator<char>(man)), std::istreambuf_iterator<char>());
  CHECK(text.find("enc/w") != std::string::npos);
  CHECK(text.find("head/b") != std::string::npos);
}

TEST_CASE("checkpoint without optimizer state loads cleanly") {
  std::mt19937_64 rng(10);
  ParamStore ps;
  ps.create_glorot("p", {2}, rng);

  auto path = temp_path("ckpt_noopt.bin");
  Cleanup cleanup{{path, path + ".manifest.txt"}};
  save_checkpoint(path, ps, nullptr, "{}");

  ParamStore fresh;
  fresh.create("p", {2});
  Adam opt{AdamConfig{}};
  auto meta = load_checkpoint(path, fresh, &opt);
  CHECK_FALSE(meta.has_optimizer);
  CHECK(opt.steps_taken() == 0);  // untouched
  CHECK(fresh.get("p").value.v == ps.get("p").value.v);
}

TEST_CASE("mismatches are collected into one error naming everything wrong") {
  std::mt19937_64 rng(11);
  ParamStore ps;
  ps.create_glorot("alpha/w", {2}, rng);
  ps.create_glorot("beta/w", {3}, rng);
  ps.create_glorot("gamma/w", {4}, rng);

  auto path = temp_path("ckpt_mismatch.bin");
  Cleanup cleanup{{path, path + ".manifest.txt"}};
  save_checkpoint(path, ps, nullptr, "{}");

  // alpha missing from the store entirely, beta present with the wrong
  // shape, gamma fine; both problems must appear in the same message
  ParamStore other;
  other.create("beta/w", {3, 3});
  other.create("gamma/w", {4});
  try {
    load_checkpoint(path, other);
    FAIL("expected a mismatch error");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("alpha/w") != std::string::npos);
    CHECK(msg.find("beta/w") != std::string::npos);
  }
}

TEST_CASE("corrupt or missing files are hard errors") {
  CHECK_THROWS_AS(read_checkpoint_config(temp_path("ckpt_nonexistent.bin")), std::runtime_error);

  auto path = temp_path("ckpt_corrupt.bin");
  Cleanup cleanup{{path}};
  std::ofstream out(path, std::ios::binary);
  out << "WRONGMAG garbage";
  out.close();
  ParamStore ps;
  CHECK_THROWS_AS(load_checkpoint(path, ps), std::runtime_error);
}
