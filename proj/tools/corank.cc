#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corank/corpus/conll.h"
#include "corank/corpus/jsonl.h"
#include "corank/metrics/metrics.h"
#include "corank/model/config.h"
#include "corank/model/doc_scorer.h"
#include "corank/model/model.h"
#include "corank/nn/checkpoint.h"
#include "corank/trainer/trainer.h"

namespace {

using namespace corank;

// The CoNLL table format announces itself on the first line; everything else
// is treated as the one-document-per-line format.
std::vector<corpus::Document> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file " + path);
  std::string first;
  std::getline(in, first);
  in.clear();
  in.seekg(0);
  if (first.rfind("#begin document", 0) == 0) return corpus::read_conll(in);
  return corpus::read_jsonl(in);
}

struct Overrides {
  std::optional<std::string> mode;
  std::optional<double> threshold;
  std::optional<std::string> singletons;
  std::optional<uint64_t> seed;
  bool no_cluster_history = false;
  bool no_position_emb = false;
  bool no_width_emb = false;
  bool system_clusters = false;
  bool strip_singletons_nr = false;
  std::optional<std::string> train, dev, input, key, response, checkpoint, out;

  void add_common(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "decode mode: prefilter, hybrid or fine");
    cmd->add_option("--threshold", threshold, "hybrid confidence threshold");
    cmd->add_option("--seed", seed, "run seed");
    cmd->add_flag("--no-cluster-history", no_cluster_history,
                  "exclude historical cluster states from the candidate window");
    cmd->add_flag("--no-position-emb", no_position_emb, "drop the salience position feature");
    cmd->add_flag("--no-width-emb", no_width_emb, "drop the span width feature");
  }

  void apply(model::RunConfig& cfg) const {
    if (mode) {
      cfg.decode.mode = model::decode_mode_from_name(*mode);
      if (cfg.decode.mode == model::DecodeMode::Fine) cfg.model.fine_nr = true;
    }
    if (threshold) cfg.decode.threshold = *threshold;
    if (singletons) {
      if (*singletons != "included" && *singletons != "excluded" && *singletons != "both")
        throw std::invalid_argument("singletons must be included, excluded or both");
      cfg.decode.singletons = *singletons;
    }
    if (seed) cfg.seed = *seed;
    if (no_cluster_history) cfg.model.cluster_history = false;
    if (no_position_emb) cfg.model.position_embedding = false;
    if (no_width_emb) cfg.model.width_embedding = false;
    if (system_clusters) cfg.train.system_clusters = true;
    if (strip_singletons_nr) cfg.train.strip_singletons_nr = true;
    if (train) cfg.paths.train = *train;
    if (dev) cfg.paths.dev = *dev;
    if (input) cfg.paths.input = *input;
    if (key) cfg.paths.key = *key;
    if (response) cfg.paths.response = *response;
    if (checkpoint) cfg.paths.checkpoint = *checkpoint;
    if (out) cfg.paths.out = *out;
  }
};

model::RunConfig load_base_config(const std::string& config_path) {
  if (config_path.empty()) return {};
  return model::load_run_config(config_path);
}

int cmd_train(const model::RunConfig& cfg) {
  if (cfg.paths.train.empty()) throw std::invalid_argument("train: no training corpus given");
  if (cfg.paths.checkpoint.empty()) throw std::invalid_argument("train: no checkpoint path given");

  std::vector<corpus::Document> raw = read_corpus(cfg.paths.train);
  std::vector<corpus::Document> docs;
  for (const corpus::Document& d : raw) {
    corpus::Document base = cfg.train.strip_singletons_nr
                                ? trainer::strip_singletons_and_nonreferring(d)
                                : d;
    for (corpus::Document& piece : trainer::split_document(base, cfg.train.max_train_tokens))
      docs.push_back(std::move(piece));
  }

  model::CorefModel model(cfg.model, cfg.seed);
  trainer::Trainer tr(model, cfg);

  std::function<double(long)> dev_hook;
  std::vector<corpus::Document> dev_docs;
  if (!cfg.paths.dev.empty()) {
    dev_docs = read_corpus(cfg.paths.dev);
    dev_hook = [&](long) {
      std::vector<corpus::Document> predicted;
      for (const corpus::Document& d : dev_docs)
        predicted.push_back(model::predict_document(model, d, cfg.decode));
      metrics::EvalReport report =
          metrics::evaluate_corpus(dev_docs, predicted, cfg.model.fine_nr);
      return report.included.conll;
    };
  }

  tr.run(docs, dev_hook, std::cout);
  std::cout << "trained " << tr.steps_taken() << " steps, checkpoint at " << cfg.paths.checkpoint
            << "\n";
  return 0;
}

int cmd_predict(const model::RunConfig& flags_cfg, const Overrides& ov) {
  if (flags_cfg.paths.checkpoint.empty())
    throw std::invalid_argument("predict: no checkpoint given");
  if (flags_cfg.paths.input.empty()) throw std::invalid_argument("predict: no input corpus given");
  if (flags_cfg.paths.out.empty()) throw std::invalid_argument("predict: no output path given");

  // the checkpoint's config snapshot decides the model shape; decode settings
  // may still be overridden from the command line
  model::RunConfig cfg =
      model::run_config_from_json(nn::read_checkpoint_config(flags_cfg.paths.checkpoint));
  if (ov.mode) cfg.decode.mode = model::decode_mode_from_name(*ov.mode);
  if (ov.threshold) cfg.decode.threshold = *ov.threshold;
  if (ov.no_cluster_history) cfg.model.cluster_history = false;

  model::CorefModel model(cfg.model, cfg.seed);
  nn::load_checkpoint(flags_cfg.paths.checkpoint, model.params());

  std::vector<corpus::Document> docs = read_corpus(flags_cfg.paths.input);
  std::ofstream out(flags_cfg.paths.out);
  if (!out) throw std::runtime_error("cannot open output file " + flags_cfg.paths.out);
  for (const corpus::Document& d : docs)
    corpus::write_jsonl(out, model::predict_document(model, d, cfg.decode));
  std::cout << "predicted " << docs.size() << " documents to " << flags_cfg.paths.out << "\n";
  return 0;
}

int cmd_evaluate(const model::RunConfig& cfg, bool fine) {
  if (cfg.paths.key.empty()) throw std::invalid_argument("evaluate: no key corpus given");
  if (cfg.paths.response.empty()) throw std::invalid_argument("evaluate: no response corpus given");
  std::vector<corpus::Document> key = read_corpus(cfg.paths.key);
  std::vector<corpus::Document> response = read_corpus(cfg.paths.response);
  metrics::EvalReport report = metrics::evaluate_corpus(key, response, fine);
  std::cout << metrics::render_report(report, cfg.decode.singletons);
  if (!cfg.paths.out.empty()) {
    std::ofstream out(cfg.paths.out);
    if (!out) throw std::runtime_error("cannot open report file " + cfg.paths.out);
    out << metrics::render_report_json(report) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cluster-ranking resolver for coreference and non-referring markables"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  bool fine_eval = false;

  CLI::App* train = app.add_subcommand("train", "train a model from a run configuration");
  train->add_option("--config", config_path, "run configuration (json)");
  ov.add_common(train);
  train->add_option("--train", ov.train, "training corpus");
  train->add_option("--dev", ov.dev, "held-out corpus for checkpoint selection");
  train->add_option("--checkpoint", ov.checkpoint, "checkpoint path to write");
  train->add_flag("--system-clusters", ov.system_clusters,
                  "train on the decoder's own clusters instead of oracle ones");
  train->add_flag("--strip-singletons-nr", ov.strip_singletons_nr,
                  "drop singleton clusters and non-referring markables from training data");

  CLI::App* predict = app.add_subcommand("predict", "resolve a corpus with a trained checkpoint");
  predict->add_option("--config", config_path, "run configuration (json)");
  ov.add_common(predict);
  predict->add_option("--checkpoint", ov.checkpoint, "checkpoint to load");
  predict->add_option("--input", ov.input, "corpus to resolve");
  predict->add_option("--out", ov.out, "predictions file to write");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a response corpus against a key");
  evaluate->add_option("--config", config_path, "run configuration (json)");
  evaluate->add_option("--key", ov.key, "gold corpus");
  evaluate->add_option("--response", ov.response, "predicted corpus");
  evaluate->add_option("--out", ov.out, "write the report as json to this path");
  evaluate->add_option("--singletons", ov.singletons, "included, excluded or both");
  evaluate->add_flag("--fine", fine_eval, "require non-referring types to match");

  CLI11_PARSE(app, argc, argv);

  try {
    model::RunConfig cfg = load_base_config(config_path);
    ov.apply(cfg);
    if (train->parsed()) return cmd_train(cfg);
    if (predict->parsed()) return cmd_predict(cfg, ov);
    return cmd_evaluate(cfg, fine_eval || cfg.model.fine_nr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
