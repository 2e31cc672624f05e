#pragma once

#include <optional>
#include <string>

#include "corank/nn/optimizer.h"
#include "corank/nn/params.h"

namespace corank::nn {

// Versioned binary checkpoint. Layout (all integers little-endian):
//   magic "CRNKCKP1", u32 version,
//   u64 config length + config bytes (json snapshot),
//   u64 entry count, entries of (u32 name len, name, u32 ndim, u32 dims...,
//   f64 row-major data, f64 adam m, f64 adam u),
//   u8 optimizer flag, then u64 step and f64 learning rate when set.
// A text manifest listing names and shapes is written next to the file as
// <path>.manifest.txt.
void save_checkpoint(const std::string& path, const ParamStore& ps, const Adam* opt,
                     const std::string& config_json);

struct CheckpointMeta {
  std::string config_json;
  long step = 0;
  double lr = 0.0;
  bool has_optimizer = false;
};

// Restores parameter values (and moments when present) into an existing
// store. Every checkpoint entry must match a parameter of the same name and
// shape; mismatches are collected and reported in one error.
CheckpointMeta load_checkpoint(const std::string& path, ParamStore& ps, Adam* opt = nullptr);

// Reads only the config snapshot.
std::string read_checkpoint_config(const std::string& path);

}  // namespace corank::nn
