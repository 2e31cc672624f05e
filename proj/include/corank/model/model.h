#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "corank/corpus/document.h"
#include "corank/corpus/embeddings.h"
#include "corank/model/config.h"
#include "corank/nn/layers.h"

namespace corank::model {

// Per-token graph handles produced by the encoder.
struct EncodedDoc {
  std::vector<int> x_in;    // input embedding per token (post dropout)
  std::vector<int> x_ctx;   // recurrent context vector per token
  std::vector<int> alpha;   // head-scoring logit per token (empty when the
                            // span-offset head feature is enabled)
};

// A span representation together with its head-attention weights.
struct SpanRepr {
  int repr = -1;
  int weights = -1;
};

// All candidate spans of a document with representations and mention scores.
struct ScoredSpans {
  std::vector<corpus::Span> spans;
  std::vector<int> repr;
  std::vector<int> weights;
  std::vector<int> score;
  std::vector<double> score_val;
};

// Holds the parameters and the graph-building logic shared by training and
// inference: token encoding (embeddings, character convolution, stacked
// bidirectional recurrence), span representations with attention heads, and
// the four scoring nets (mention, salience, pairwise, epsilon).
class CorefModel {
 public:
  CorefModel(ModelConfig cfg, uint64_t seed);
  CorefModel(ModelConfig cfg, uint64_t seed,
             std::vector<std::unique_ptr<corpus::EmbeddingSource>> sources,
             std::vector<corpus::ContextualStore> contextual);

  const ModelConfig& config() const { return cfg_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  int input_dim() const { return input_dim_; }
  int context_dim() const { return 2 * cfg_.bilstm_size; }
  int span_repr_dim() const {
    return 2 * context_dim() + input_dim_ + (cfg_.width_embedding ? cfg_.feature_size : 0);
  }
  int genre_id(const std::string& genre) const;

  EncodedDoc encode(nn::Graph& g, const corpus::Document& doc) const;
  SpanRepr span_repr(nn::Graph& g, const EncodedDoc& enc, const corpus::Span& s) const;
  int mention_score_node(nn::Graph& g, int repr) const;
  ScoredSpans score_spans(nn::Graph& g, const EncodedDoc& enc, const corpus::Document& doc) const;

  // scoring nets used by the document scorer
  std::vector<int> epsilon_nodes(nn::Graph& g, int repr, int sm) const;
  int salience_node(nn::Graph& g, int repr, int position) const;
  int pair_node(nn::Graph& g, int repr_i, int cstar, int genre_node, bool same_speaker,
                int distance, int cluster_size) const;
  int genre_node(nn::Graph& g, const corpus::Document& doc) const;

 private:
  void build_params(uint64_t seed);
  std::vector<int> token_inputs(nn::Graph& g, const corpus::Document& doc) const;

  ModelConfig cfg_;
  nn::ParamStore params_;
  std::vector<std::unique_ptr<corpus::EmbeddingSource>> sources_;
  std::vector<corpus::ContextualStore> contextual_;
  int input_dim_ = 0;

  nn::CharCnn char_cnn_;
  nn::BiLstm bilstm_;
  nn::Ffnn head_, mention_, salience_, pair_, eps_;
  nn::Param* width_emb_ = nullptr;
  nn::Param* genre_emb_ = nullptr;
  nn::Param* speaker_emb_ = nullptr;
  nn::Param* distance_emb_ = nullptr;
  nn::Param* size_emb_ = nullptr;
  nn::Param* position_emb_ = nullptr;
  nn::Param* head_offset_emb_ = nullptr;
};

}  // namespace corank::model
