#include "corank/model/model.h"

#include <stdexcept>

#include "corank/corpus/buckets.h"
#include "corank/model/spans.h"

namespace corank::model {

namespace {
constexpr uint64_t kHashSeed = 0x9e3779b97f4a7c15ull;  // fixed so vectors survive process restarts
}

CorefModel::CorefModel(ModelConfig cfg, uint64_t seed) : cfg_(std::move(cfg)) {
  for (const EmbeddingSpec& spec : cfg_.embeddings) {
    if (spec.kind == "hashed") {
      sources_.push_back(std::make_unique<corpus::HashedEmbeddings>(spec.dim, kHashSeed));
    } else if (spec.kind == "static") {
      sources_.push_back(
          std::make_unique<corpus::StaticEmbeddings>(corpus::StaticEmbeddings::load(spec.path)));
    } else if (spec.kind == "contextual") {
      contextual_.push_back(corpus::ContextualStore::load(spec.path, spec.reducer));
    } else {
      throw std::invalid_argument("unknown embedding kind: " + spec.kind);
    }
  }
  build_params(seed);
}

CorefModel::CorefModel(ModelConfig cfg, uint64_t seed,
                       std::vector<std::unique_ptr<corpus::EmbeddingSource>> sources,
                       std::vector<corpus::ContextualStore> contextual)
    : cfg_(std::move(cfg)), sources_(std::move(sources)), contextual_(std::move(contextual)) {
  build_params(seed);
}

void CorefModel::build_params(uint64_t seed) {
  std::mt19937_64 rng(seed);
  input_dim_ = 0;
  for (const auto& s : sources_) input_dim_ += s->dim();
  for (const auto& c : contextual_) input_dim_ += c.dim();
  if (cfg_.use_char_cnn) {
    char_cnn_ = nn::make_char_cnn(params_, "char_cnn", cfg_.char_emb_size, cfg_.cnn_filter_widths,
                                  cfg_.cnn_filter_size, rng);
    input_dim_ += char_cnn_.out_dim();
  }
  if (input_dim_ == 0) throw std::invalid_argument("model has no token input embeddings");

  bilstm_ = nn::make_bilstm(params_, "bilstm", input_dim_, cfg_.bilstm_size, cfg_.bilstm_layers,
                            cfg_.bilstm_dropout, rng);

  int f = cfg_.feature_size;
  if (cfg_.width_embedding)
    width_emb_ = &params_.create_glorot("emb/span_width", {cfg_.max_span_width, f}, rng);
  genre_emb_ = &params_.create_glorot("emb/genre", {static_cast<int>(cfg_.genres.size()) + 1, f}, rng);
  speaker_emb_ = &params_.create_glorot("emb/same_speaker", {2, f}, rng);
  distance_emb_ = &params_.create_glorot("emb/mention_distance", {corpus::kNumDistanceBuckets, f}, rng);
  if (cfg_.cluster_size_embedding)
    size_emb_ = &params_.create_glorot("emb/cluster_size", {corpus::kNumSizeBuckets, f}, rng);
  if (cfg_.position_embedding)
    position_emb_ = &params_.create_glorot("emb/cluster_position", {corpus::kNumSizeBuckets, f}, rng);
  if (cfg_.head_position_feature)
    head_offset_emb_ = &params_.create_glorot("emb/head_offset", {corpus::kNumDistanceBuckets, f}, rng);

  int head_in = context_dim() + (cfg_.head_position_feature ? f : 0);
  head_ = nn::make_ffnn(params_, "head", head_in, cfg_.ffnn_depth, cfg_.ffnn_size, 1,
                        cfg_.ffnn_dropout, rng);
  mention_ = nn::make_ffnn(params_, "mention", span_repr_dim(), cfg_.ffnn_depth, cfg_.ffnn_size, 1,
                           cfg_.ffnn_dropout, rng);
  int sal_in = span_repr_dim() + (cfg_.position_embedding ? f : 0);
  salience_ = nn::make_ffnn(params_, "salience", sal_in, cfg_.ffnn_depth, cfg_.ffnn_size, 1,
                            cfg_.ffnn_dropout, rng);
  int pair_in = 3 * span_repr_dim() + 3 * f + (cfg_.cluster_size_embedding ? f : 0);
  pair_ = nn::make_ffnn(params_, "pair", pair_in, cfg_.ffnn_depth, cfg_.ffnn_size, 1,
                        cfg_.ffnn_dropout, rng);
  eps_ = nn::make_ffnn(params_, "eps", span_repr_dim(), cfg_.ffnn_depth, cfg_.ffnn_size,
                       cfg_.n_eps(), cfg_.ffnn_dropout, rng);
}

int CorefModel::genre_id(const std::string& genre) const {
  for (size_t i = 0; i < cfg_.genres.size(); ++i)
    if (cfg_.genres[i] == genre) return static_cast<int>(i) + 1;
  return 0;
}

std::vector<int> CorefModel::token_inputs(nn::Graph& g, const corpus::Document& doc) const {
  std::vector<int> out(doc.num_tokens());
  for (int t = 0; t < doc.num_tokens(); ++t) {
    std::vector<int> parts;
    for (const auto& src : sources_) parts.push_back(g.constant(nn::Tensor::vec(src->get(doc.tokens[t].text))));
    for (const auto& ctx : contextual_) parts.push_back(g.constant(nn::Tensor::vec(ctx.get(doc.doc_key, t))));
    if (cfg_.use_char_cnn) parts.push_back(char_cnn_.apply(g, doc.tokens[t].text));
    out[t] = g.dropout(parts.size() == 1 ? parts[0] : g.concat(parts), cfg_.embedding_dropout);
  }
  return out;
}

EncodedDoc CorefModel::encode(nn::Graph& g, const corpus::Document& doc) const {
  EncodedDoc enc;
  if (doc.num_tokens() == 0) return enc;
  enc.x_in = token_inputs(g, doc);
  enc.x_ctx.resize(doc.num_tokens());
  for (auto [first, last] : doc.sentence_ranges()) {
    std::vector<int> xs(enc.x_in.begin() + first, enc.x_in.begin() + last + 1);
    std::vector<int> ctx = bilstm_.apply(g, xs);
    for (int t = first; t <= last; ++t) enc.x_ctx[t] = ctx[t - first];
  }
  if (!cfg_.head_position_feature) {
    enc.alpha.resize(doc.num_tokens());
    for (int t = 0; t < doc.num_tokens(); ++t) enc.alpha[t] = head_.apply(g, enc.x_ctx[t]);
  }
  return enc;
}

SpanRepr CorefModel::span_repr(nn::Graph& g, const EncodedDoc& enc, const corpus::Span& s) const {
  if (s.start < 0 || s.end >= static_cast<int>(enc.x_ctx.size()) || s.start > s.end)
    throw std::invalid_argument("span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                                "] out of range");
  if (s.width() > cfg_.max_span_width)
    throw std::invalid_argument("span width " + std::to_string(s.width()) + " exceeds maximum " +
                                std::to_string(cfg_.max_span_width));
  std::vector<int> logits, values;
  for (int t = s.start; t <= s.end; ++t) {
    if (cfg_.head_position_feature) {
      int feat = g.lookup(*head_offset_emb_, corpus::bucket_distance(t - s.start));
      logits.push_back(head_.apply(g, g.concat({enc.x_ctx[t], feat})));
    } else {
      logits.push_back(enc.alpha[t]);
    }
    values.push_back(enc.x_in[t]);
  }
  SpanRepr r;
  r.weights = g.softmax(g.concat(logits));
  int head_vec = g.weighted_sum(values, r.weights);
  std::vector<int> parts = {enc.x_ctx[s.start], enc.x_ctx[s.end], head_vec};
  if (cfg_.width_embedding) parts.push_back(g.lookup(*width_emb_, s.width() - 1));
  r.repr = g.concat(parts);
  return r;
}

int CorefModel::mention_score_node(nn::Graph& g, int repr) const { return mention_.apply(g, repr); }

ScoredSpans CorefModel::score_spans(nn::Graph& g, const EncodedDoc& enc, const corpus::Document& doc) const {
  ScoredSpans out;
  out.spans = enumerate_spans(doc.num_tokens(), cfg_.max_span_width);
  out.repr.reserve(out.spans.size());
  for (const corpus::Span& s : out.spans) {
    SpanRepr r = span_repr(g, enc, s);
    int sm = mention_score_node(g, r.repr);
    out.repr.push_back(r.repr);
    out.weights.push_back(r.weights);
    out.score.push_back(sm);
    out.score_val.push_back(g.scalar_value(sm));
  }
  return out;
}

std::vector<int> CorefModel::epsilon_nodes(nn::Graph& g, int repr, int sm) const {
  int raw = eps_.apply(g, repr);
  std::vector<int> out(cfg_.n_eps());
  out[0] = g.pick(raw, 0);
  for (int k = 1; k < cfg_.n_eps(); ++k) out[k] = g.add(g.pick(raw, k), sm);
  return out;
}

int CorefModel::salience_node(nn::Graph& g, int repr, int position) const {
  if (!cfg_.position_embedding) return salience_.apply(g, repr);
  int feat = g.lookup(*position_emb_, corpus::bucket_cluster_size(position));
  return salience_.apply(g, g.concat({repr, feat}));
}

int CorefModel::genre_node(nn::Graph& g, const corpus::Document& doc) const {
  return g.lookup(*genre_emb_, genre_id(doc.genre));
}

int CorefModel::pair_node(nn::Graph& g, int repr_i, int cstar, int genre_node, bool same_speaker,
                          int distance, int cluster_size) const {
  std::vector<int> parts = {repr_i, cstar, g.cmul(repr_i, cstar), genre_node,
                            g.lookup(*speaker_emb_, same_speaker ? 1 : 0),
                            g.lookup(*distance_emb_, corpus::bucket_distance(distance))};
  if (cfg_.cluster_size_embedding)
    parts.push_back(g.lookup(*size_emb_, corpus::bucket_cluster_size(cluster_size)));
  return pair_.apply(g, g.concat(parts));
}

}  // namespace corank::model
