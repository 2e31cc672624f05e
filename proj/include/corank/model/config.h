#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace corank::model {

enum class DecodeMode { Prefilter, Hybrid, Fine };
DecodeMode decode_mode_from_name(const std::string& s);
std::string decode_mode_name(DecodeMode m);

struct EmbeddingSpec {
  std::string kind;          // "static" | "contextual" | "hashed"
  std::string path;          // unused for hashed
  int dim = 64;              // hashed only
  std::string reducer = "concat";  // contextual only: "concat" | "mean"
  bool operator==(const EmbeddingSpec&) const = default;
};

struct ModelConfig {
  std::vector<EmbeddingSpec> embeddings = {{"hashed", "", 64, "concat"}};
  bool use_char_cnn = true;
  int char_emb_size = 8;
  std::vector<int> cnn_filter_widths = {3, 4, 5};
  int cnn_filter_size = 50;

  int bilstm_layers = 3;
  int bilstm_size = 200;
  double bilstm_dropout = 0.4;
  int ffnn_depth = 2;
  int ffnn_size = 150;
  double ffnn_dropout = 0.2;
  double embedding_dropout = 0.5;
  int feature_size = 20;

  int max_span_width = 30;
  double span_ratio = 0.4;
  int max_clusters = 250;
  std::vector<std::string> genres = {"bc", "bn", "mz", "nw", "pt", "tc", "wb"};

  bool fine_nr = false;           // seven epsilon classes instead of three
  bool cluster_history = true;
  bool width_embedding = true;          // span width feature in the representation
  bool position_embedding = true;       // salience input feature
  bool cluster_size_embedding = true;   // pairwise feature
  bool head_position_feature = false;   // span-internal offset feature for head scoring

  int n_eps() const { return fine_nr ? 7 : 3; }
  bool operator==(const ModelConfig&) const = default;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  double decay_rate = 0.999;
  int decay_frequency = 100;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  long steps = 200000;
  int checkpoint_frequency = 5000;
  int eval_frequency = 5000;
  int max_train_tokens = 0;   // 0 disables sentence-boundary splitting
  bool strip_singletons_nr = false;
  bool system_clusters = false;  // train on the decoder's own states instead of oracle ones
  bool operator==(const TrainConfig&) const = default;
};

struct DecodeConfig {
  DecodeMode mode = DecodeMode::Hybrid;
  double threshold = 0.5;
  std::string singletons = "both";  // "included" | "excluded" | "both" (evaluate only)
  bool operator==(const DecodeConfig&) const = default;
};

struct Paths {
  std::string train, dev, input, key, response, checkpoint, out;
  bool operator==(const Paths&) const = default;
};

struct RunConfig {
  uint64_t seed = 0;
  ModelConfig model;
  TrainConfig train;
  DecodeConfig decode;
  Paths paths;
  bool operator==(const RunConfig&) const = default;
};

std::string to_json_string(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);

}  // namespace corank::model
