#include "corank/model/doc_scorer.h"

#include <stdexcept>

#include "corank/corpus/buckets.h"
#include "corank/model/spans.h"

namespace corank::model {

namespace {
int64_t memo_key(int a, int b) { return (static_cast<int64_t>(a) << 32) | static_cast<uint32_t>(b); }
}  // namespace

DocScorer::DocScorer(nn::Graph& g, const CorefModel& model, const corpus::Document& doc,
                     ScoredSpans kept)
    : g_(g), model_(model), kept_(std::move(kept)) {
  genre_node_ = model_.genre_node(g_, doc);
  speaker_of_.reserve(kept_.spans.size());
  for (const corpus::Span& s : kept_.spans) speaker_of_.push_back(doc.tokens.at(s.start).speaker);
  eps_nodes_.resize(kept_.spans.size());
}

double DocScorer::mention_score(int i) { return g_.scalar_value(mention_node(i)); }

const std::vector<int>& DocScorer::epsilon_node_vec(int i) {
  auto& nodes = eps_nodes_.at(i);
  if (nodes.empty()) nodes = model_.epsilon_nodes(g_, kept_.repr[i], kept_.score[i]);
  return nodes;
}

std::vector<double> DocScorer::epsilon_scores(int i) {
  std::vector<double> out;
  for (int id : epsilon_node_vec(i)) out.push_back(g_.scalar_value(id));
  return out;
}

int DocScorer::salience_node(int i, int position) {
  // positions sharing a size bucket produce the same value, so share the node
  int64_t key = memo_key(i, corpus::bucket_cluster_size(position));
  auto it = salience_memo_.find(key);
  if (it != salience_memo_.end()) return it->second;
  int id = model_.salience_node(g_, kept_.repr.at(i), position);
  salience_memo_.emplace(key, id);
  return id;
}

double DocScorer::salience_logit(int i, int position) {
  return g_.scalar_value(salience_node(i, position));
}

int DocScorer::make_payload(decoder::ClusterState& st) {
  StateNodes sn;
  for (size_t k = 0; k < st.members.size(); ++k)
    sn.beta.push_back(salience_node(st.members[k], static_cast<int>(k) + 1));
  std::vector<int> reprs, scores;
  for (int m : st.members) {
    reprs.push_back(kept_.repr.at(m));
    scores.push_back(kept_.score.at(m));
  }
  sn.attn = g_.softmax(g_.concat(sn.beta));
  sn.cstar = g_.weighted_sum(reprs, sn.attn);
  sn.sc = g_.dot(sn.attn, g_.concat(scores));
  st.cstar = g_.value(sn.cstar).v;
  payloads_.push_back(sn);
  return static_cast<int>(payloads_.size()) - 1;
}

int DocScorer::pair_feature_node(int i, const decoder::ClusterState& st) {
  int64_t key = memo_key(i, st.payload);
  auto it = pair_memo_.find(key);
  if (it != pair_memo_.end()) return it->second;
  const StateNodes& sn = payloads_.at(st.payload);
  int newest = st.newest_mention();
  if (newest >= i) throw std::logic_error("candidate cluster is not to the left of the mention");
  int id = model_.pair_node(g_, kept_.repr.at(i), sn.cstar, genre_node_,
                            speaker_of_.at(i) == speaker_of_.at(newest), i - newest, st.size());
  pair_memo_.emplace(key, id);
  return id;
}

double DocScorer::pair_score(int i, const decoder::ClusterState& st) {
  return g_.scalar_value(pair_feature_node(i, st));
}

int DocScorer::candidate_node(int i, const decoder::ClusterState& st) {
  const StateNodes& sn = payloads_.at(st.payload);
  return g_.sum({kept_.score.at(i), sn.sc, pair_feature_node(i, st)});
}

ScoredSpans select_spans(const ScoredSpans& all, const std::vector<int>& idx) {
  ScoredSpans out;
  for (int k : idx) {
    out.spans.push_back(all.spans.at(k));
    out.repr.push_back(all.repr.at(k));
    out.weights.push_back(all.weights.at(k));
    out.score.push_back(all.score.at(k));
    out.score_val.push_back(all.score_val.at(k));
  }
  return out;
}

ScoredSpans score_and_prune(nn::Graph& g, const CorefModel& model, const corpus::Document& doc) {
  EncodedDoc enc = model.encode(g, doc);
  ScoredSpans all = model.score_spans(g, enc, doc);
  std::vector<int> idx =
      prune_spans(all.spans, all.score_val, model.config().span_ratio, doc.num_tokens());
  return select_spans(all, idx);
}

corpus::Document predict_document(const CorefModel& model, const corpus::Document& doc,
                                  const DecodeConfig& dc) {
  nn::Graph g;
  DocScorer scorer(g, model, doc, score_and_prune(g, model, doc));
  decoder::ResolveOptions opts;
  opts.mode = dc.mode;
  opts.threshold = dc.threshold;
  opts.history = model.config().cluster_history;
  opts.max_clusters = model.config().max_clusters;
  decoder::Resolution res = decoder::resolve(scorer, opts);
  return decoder::resolution_to_document(res, scorer.kept().spans, doc);
}

}  // namespace corank::model
