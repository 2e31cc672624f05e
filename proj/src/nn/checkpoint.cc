#include "corank/nn/checkpoint.h"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>
#include <vector>

namespace corank::nn {

namespace {

constexpr char kMagic[8] = {'C', 'R', 'N', 'K', 'C', 'K', 'P', '1'};
constexpr uint32_t kVersion = 1;

void put_bytes(std::ostream& os, const void* p, size_t n) { os.write(static_cast<const char*>(p), n); }

void put_u32(std::ostream& os, uint32_t x) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((x >> (8 * i)) & 0xff);
  put_bytes(os, b, 4);
}

void put_u64(std::ostream& os, uint64_t x) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((x >> (8 * i)) & 0xff);
  put_bytes(os, b, 8);
}

void put_f64(std::ostream& os, double d) {
  uint64_t x;
  std::memcpy(&x, &d, 8);
  put_u64(os, x);
}

void get_bytes(std::istream& is, void* p, size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!is) throw std::runtime_error("truncated checkpoint");
}

uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  get_bytes(is, b, 4);
  uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= static_cast<uint32_t>(b[i]) << (8 * i);
  return x;
}

uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  get_bytes(is, b, 8);
  uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<uint64_t>(b[i]) << (8 * i);
  return x;
}

double get_f64(std::istream& is) {
  uint64_t x = get_u64(is);
  double d;
  std::memcpy(&d, &x, 8);
  return d;
}

void put_tensor_data(std::ostream& os, const Tensor& t) {
  for (double d : t.v) put_f64(os, d);
}

std::string open_header(std::ifstream& is, const std::string& path) {
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  get_bytes(is, magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("not a checkpoint file: " + path);
  uint32_t version = get_u32(is);
  if (version != kVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) + " in " + path);
  uint64_t cfg_len = get_u64(is);
  std::string cfg(cfg_len, '\0');
  if (cfg_len) get_bytes(is, cfg.data(), cfg_len);
  return cfg;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamStore& ps, const Adam* opt,
                     const std::string& config_json) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  put_bytes(os, kMagic, 8);
  put_u32(os, kVersion);
  put_u64(os, config_json.size());
  put_bytes(os, config_json.data(), config_json.size());
  put_u64(os, ps.all().size());
  for (const auto& up : ps.all()) {
    put_u32(os, static_cast<uint32_t>(up->name.size()));
    put_bytes(os, up->name.data(), up->name.size());
    put_u32(os, static_cast<uint32_t>(up->value.ndim()));
    for (int d : up->value.shape) put_u32(os, static_cast<uint32_t>(d));
    put_tensor_data(os, up->value);
    put_tensor_data(os, up->m);
    put_tensor_data(os, up->u);
  }
  unsigned char flag = opt ? 1 : 0;
  put_bytes(os, &flag, 1);
  if (opt) {
    put_u64(os, static_cast<uint64_t>(opt->steps_taken()));
    put_f64(os, opt->learning_rate());
  }
  if (!os) throw std::runtime_error("failed writing checkpoint: " + path);

  std::ofstream man(path + ".manifest.txt");
  if (!man) throw std::runtime_error("cannot open manifest for writing: " + path + ".manifest.txt");
  for (const auto& up : ps.all()) man << up->name << " " << up->value.shape_str() << "\n";
}

CheckpointMeta load_checkpoint(const std::string& path, ParamStore& ps, Adam* opt) {
  std::ifstream is(path, std::ios::binary);
  CheckpointMeta meta;
  meta.config_json = open_header(is, path);

  uint64_t count = get_u64(is);
  std::vector<std::string> mismatches;
  std::set<std::string> seen;
  for (uint64_t e = 0; e < count; ++e) {
    uint32_t name_len = get_u32(is);
    std::string name(name_len, '\0');
    if (name_len) get_bytes(is, name.data(), name_len);
    uint32_t ndim = get_u32(is);
    std::vector<int> shape(ndim);
    for (uint32_t i = 0; i < ndim; ++i) shape[i] = static_cast<int>(get_u32(is));
    int n = shape_size(shape);
    std::vector<double> value(n), m(n), u(n);
    for (double& d : value) d = get_f64(is);
    for (double& d : m) d = get_f64(is);
    for (double& d : u) d = get_f64(is);

    seen.insert(name);
    Param* p = ps.find(name);
    if (!p) {
      mismatches.push_back(name + " (not in model)");
      continue;
    }
    if (p->value.shape != shape) {
      mismatches.push_back(name + " (checkpoint " + Tensor::zeros(shape).shape_str() + " vs model " +
                           p->value.shape_str() + ")");
      continue;
    }
    p->value.v = std::move(value);
    p->m.v = std::move(m);
    p->u.v = std::move(u);
  }
  for (const auto& up : ps.all())
    if (!seen.count(up->name)) mismatches.push_back(up->name + " (missing from checkpoint)");
  if (!mismatches.empty()) {
    std::string msg = "checkpoint " + path + " does not match model parameters:";
    for (const auto& s : mismatches) msg += "\n  " + s;
    throw std::runtime_error(msg);
  }

  unsigned char flag = 0;
  get_bytes(is, &flag, 1);
  if (flag) {
    meta.has_optimizer = true;
    meta.step = static_cast<long>(get_u64(is));
    meta.lr = get_f64(is);
    if (opt) opt->restore(meta.step, meta.lr);
  }
  return meta;
}

std::string read_checkpoint_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return open_header(is, path);
}

}  // namespace corank::nn
