#pragma once

#include <unordered_map>
#include <vector>

#include "corank/decoder/resolver.h"
#include "corank/model/model.h"

namespace corank::model {

// Graph handles for one cluster-state version.
struct StateNodes {
  std::vector<int> beta;  // salience logit per member
  int attn = -1;          // softmax over the betas
  int cstar = -1;         // attention-weighted member representation
  int sc = -1;            // attention-weighted member mention score
};

// Scores one document's kept spans on a live graph. Implements the resolver
// interface with plain doubles read off the tape, and exposes the node ids so
// the trainer can assemble a loss over the very same computations.
class DocScorer : public decoder::ClusterScorer {
 public:
  DocScorer(nn::Graph& g, const CorefModel& model, const corpus::Document& doc, ScoredSpans kept);

  int num_mentions() const override { return static_cast<int>(kept_.spans.size()); }
  int n_eps() const override { return model_.config().n_eps(); }
  double mention_score(int i) override;
  std::vector<double> epsilon_scores(int i) override;
  double salience_logit(int i, int position) override;
  int make_payload(decoder::ClusterState& st) override;
  double pair_score(int i, const decoder::ClusterState& st) override;

  // node-level access
  const ScoredSpans& kept() const { return kept_; }
  int mention_node(int i) const { return kept_.score.at(i); }
  const std::vector<int>& epsilon_node_vec(int i);
  int salience_node(int i, int position);
  int pair_feature_node(int i, const decoder::ClusterState& st);  // representation part only
  int candidate_node(int i, const decoder::ClusterState& st);     // full cluster score
  const StateNodes& state_nodes(int payload) const { return payloads_.at(payload); }

 private:
  nn::Graph& g_;
  const CorefModel& model_;
  ScoredSpans kept_;
  int genre_node_ = -1;
  std::vector<int> speaker_of_;
  std::vector<std::vector<int>> eps_nodes_;          // per mention, empty until built
  std::unordered_map<int64_t, int> salience_memo_;   // mention + size bucket
  std::unordered_map<int64_t, int> pair_memo_;       // mention + payload
  std::vector<StateNodes> payloads_;
};

// Compacts scored spans down to the given indices (used after pruning).
ScoredSpans select_spans(const ScoredSpans& all, const std::vector<int>& idx);

// Encode, score every candidate span and prune to the kept mentions.
ScoredSpans score_and_prune(nn::Graph& g, const CorefModel& model, const corpus::Document& doc);

// End-to-end inference for one document: kept mentions resolved into clusters
// and non-referring markables under the given decode settings.
corpus::Document predict_document(const CorefModel& model, const corpus::Document& doc,
                                  const DecodeConfig& dc);

}  // namespace corank::model
