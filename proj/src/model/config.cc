#include "corank/model/config.h"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace corank::model {

using nlohmann::json;

DecodeMode decode_mode_from_name(const std::string& s) {
  if (s == "prefilter") return DecodeMode::Prefilter;
  if (s == "hybrid") return DecodeMode::Hybrid;
  if (s == "fine") return DecodeMode::Fine;
  throw std::invalid_argument("unknown decode mode: " + s + " (expected prefilter, hybrid or fine)");
}

std::string decode_mode_name(DecodeMode m) {
  switch (m) {
    case DecodeMode::Prefilter: return "prefilter";
    case DecodeMode::Hybrid: return "hybrid";
    case DecodeMode::Fine: return "fine";
  }
  throw std::logic_error("bad DecodeMode");
}

namespace {

// Reads j[key] into out when present, leaving the default otherwise.
template <typename T>
void opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json to_json(const EmbeddingSpec& e) {
  return json{{"kind", e.kind}, {"path", e.path}, {"dim", e.dim}, {"reducer", e.reducer}};
}

EmbeddingSpec embedding_from_json(const json& j) {
  EmbeddingSpec e;
  e.kind = j.at("kind").get<std::string>();
  if (e.kind != "static" && e.kind != "contextual" && e.kind != "hashed")
    throw std::invalid_argument("unknown embedding kind: " + e.kind);
  opt(j, "path", e.path);
  opt(j, "dim", e.dim);
  opt(j, "reducer", e.reducer);
  return e;
}

}  // namespace

std::string to_json_string(const RunConfig& cfg) {
  json m;
  m["embeddings"] = json::array();
  for (const auto& e : cfg.model.embeddings) m["embeddings"].push_back(to_json(e));
  m["use_char_cnn"] = cfg.model.use_char_cnn;
  m["char_emb_size"] = cfg.model.char_emb_size;
  m["cnn_filter_widths"] = cfg.model.cnn_filter_widths;
  m["cnn_filter_size"] = cfg.model.cnn_filter_size;
  m["bilstm_layers"] = cfg.model.bilstm_layers;
  m["bilstm_size"] = cfg.model.bilstm_size;
  m["bilstm_dropout"] = cfg.model.bilstm_dropout;
  m["ffnn_depth"] = cfg.model.ffnn_depth;
  m["ffnn_size"] = cfg.model.ffnn_size;
  m["ffnn_dropout"] = cfg.model.ffnn_dropout;
  m["embedding_dropout"] = cfg.model.embedding_dropout;
  m["feature_size"] = cfg.model.feature_size;
  m["max_span_width"] = cfg.model.max_span_width;
  m["span_ratio"] = cfg.model.span_ratio;
  m["max_clusters"] = cfg.model.max_clusters;
  m["genres"] = cfg.model.genres;
  m["fine_nr"] = cfg.model.fine_nr;
  m["cluster_history"] = cfg.model.cluster_history;
  m["width_embedding"] = cfg.model.width_embedding;
  m["position_embedding"] = cfg.model.position_embedding;
  m["cluster_size_embedding"] = cfg.model.cluster_size_embedding;
  m["head_position_feature"] = cfg.model.head_position_feature;

  json t;
  t["learning_rate"] = cfg.train.learning_rate;
  t["decay_rate"] = cfg.train.decay_rate;
  t["decay_frequency"] = cfg.train.decay_frequency;
  t["adam_beta1"] = cfg.train.adam_beta1;
  t["adam_beta2"] = cfg.train.adam_beta2;
  t["adam_eps"] = cfg.train.adam_eps;
  t["steps"] = cfg.train.steps;
  t["checkpoint_frequency"] = cfg.train.checkpoint_frequency;
  t["eval_frequency"] = cfg.train.eval_frequency;
  t["max_train_tokens"] = cfg.train.max_train_tokens;
  t["strip_singletons_nr"] = cfg.train.strip_singletons_nr;
  t["system_clusters"] = cfg.train.system_clusters;

  json d;
  d["mode"] = decode_mode_name(cfg.decode.mode);
  d["threshold"] = cfg.decode.threshold;
  d["singletons"] = cfg.decode.singletons;

  json p;
  p["train"] = cfg.paths.train;
  p["dev"] = cfg.paths.dev;
  p["input"] = cfg.paths.input;
  p["key"] = cfg.paths.key;
  p["response"] = cfg.paths.response;
  p["checkpoint"] = cfg.paths.checkpoint;
  p["out"] = cfg.paths.out;

  json root;
  root["seed"] = cfg.seed;
  root["model"] = m;
  root["train"] = t;
  root["decode"] = d;
  root["paths"] = p;
  return root.dump(2);
}

RunConfig run_config_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("invalid config json: ") + e.what());
  }
  RunConfig cfg;
  opt(root, "seed", cfg.seed);
  if (root.contains("model")) {
    const json& m = root.at("model");
    if (m.contains("embeddings")) {
      cfg.model.embeddings.clear();
      for (const json& e : m.at("embeddings")) cfg.model.embeddings.push_back(embedding_from_json(e));
    }
    opt(m, "use_char_cnn", cfg.model.use_char_cnn);
    opt(m, "char_emb_size", cfg.model.char_emb_size);
    opt(m, "cnn_filter_widths", cfg.model.cnn_filter_widths);
    opt(m, "cnn_filter_size", cfg.model.cnn_filter_size);
    opt(m, "bilstm_layers", cfg.model.bilstm_layers);
    opt(m, "bilstm_size", cfg.model.bilstm_size);
    opt(m, "bilstm_dropout", cfg.model.bilstm_dropout);
    opt(m, "ffnn_depth", cfg.model.ffnn_depth);
    opt(m, "ffnn_size", cfg.model.ffnn_size);
    opt(m, "ffnn_dropout", cfg.model.ffnn_dropout);
    opt(m, "embedding_dropout", cfg.model.embedding_dropout);
    opt(m, "feature_size", cfg.model.feature_size);
    opt(m, "max_span_width", cfg.model.max_span_width);
    opt(m, "span_ratio", cfg.model.span_ratio);
    opt(m, "max_clusters", cfg.model.max_clusters);
    opt(m, "genres", cfg.model.genres);
    opt(m, "fine_nr", cfg.model.fine_nr);
    opt(m, "cluster_history", cfg.model.cluster_history);
    opt(m, "width_embedding", cfg.model.width_embedding);
    opt(m, "position_embedding", cfg.model.position_embedding);
    opt(m, "cluster_size_embedding", cfg.model.cluster_size_embedding);
    opt(m, "head_position_feature", cfg.model.head_position_feature);
  }
  if (root.contains("train")) {
    const json& t = root.at("train");
    opt(t, "learning_rate", cfg.train.learning_rate);
    opt(t, "decay_rate", cfg.train.decay_rate);
    opt(t, "decay_frequency", cfg.train.decay_frequency);
    opt(t, "adam_beta1", cfg.train.adam_beta1);
    opt(t, "adam_beta2", cfg.train.adam_beta2);
    opt(t, "adam_eps", cfg.train.adam_eps);
    opt(t, "steps", cfg.train.steps);
    opt(t, "checkpoint_frequency", cfg.train.checkpoint_frequency);
    opt(t, "eval_frequency", cfg.train.eval_frequency);
    opt(t, "max_train_tokens", cfg.train.max_train_tokens);
    opt(t, "strip_singletons_nr", cfg.train.strip_singletons_nr);
    opt(t, "system_clusters", cfg.train.system_clusters);
  }
  if (root.contains("decode")) {
    const json& d = root.at("decode");
    if (d.contains("mode")) cfg.decode.mode = decode_mode_from_name(d.at("mode").get<std::string>());
    opt(d, "threshold", cfg.decode.threshold);
    opt(d, "singletons", cfg.decode.singletons);
    if (cfg.decode.singletons != "included" && cfg.decode.singletons != "excluded" &&
        cfg.decode.singletons != "both")
      throw std::invalid_argument("singletons must be included, excluded or both");
  }
  if (root.contains("paths")) {
    const json& p = root.at("paths");
    opt(p, "train", cfg.paths.train);
    opt(p, "dev", cfg.paths.dev);
    opt(p, "input", cfg.paths.input);
    opt(p, "key", cfg.paths.key);
    opt(p, "response", cfg.paths.response);
    opt(p, "checkpoint", cfg.paths.checkpoint);
    opt(p, "out", cfg.paths.out);
  }
  cfg.model.fine_nr = cfg.model.fine_nr || cfg.decode.mode == DecodeMode::Fine;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return run_config_from_json(text);
}

}  // namespace corank::model
