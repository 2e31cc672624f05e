#pragma once

#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "corank/corpus/document.h"
#include "corank/decoder/resolver.h"
#include "corank/model/config.h"
#include "corank/model/doc_scorer.h"
#include "corank/model/model.h"
#include "corank/nn/optimizer.h"

namespace corank::trainer {

// Training view for the coreference-only ablation: singleton clusters and
// non-referring markables removed.
corpus::Document strip_singletons_and_nonreferring(const corpus::Document& doc);

// Splits a document at sentence boundaries into pieces of at most max_tokens
// tokens each (a single over-long sentence becomes its own piece). Gold
// annotation is re-indexed per piece; spans crossing a cut are dropped.
// max_tokens <= 0 returns the document unchanged.
std::vector<corpus::Document> split_document(const corpus::Document& doc, int max_tokens);

// Gold annotation projected onto the kept spans by exact span match.
struct GoldLabels {
  std::vector<int> entity;     // gold cluster id per kept mention, -1 when none
  std::vector<int> eps_class;  // fallback epsilon class when no gold cluster state is in reach
};
GoldLabels gold_labels(const corpus::Document& doc, const std::vector<corpus::Span>& kept, int n_eps);

struct OracleStep {
  int mention = -1;
  std::vector<int> candidates;  // cluster state ids, newest first
  std::vector<int> gold;        // positions into [epsilon scores ++ candidate scores]
};

struct OracleStates {
  std::vector<decoder::ClusterState> states;
  std::vector<OracleStep> steps;
};

// Grows clusters by gold entity as mentions arrive; at each step the window
// of candidate states is snapshotted and the gold positions marked.
OracleStates build_oracle_states(decoder::ClusterScorer& scorer, const GoldLabels& gold,
                                 bool history, int max_clusters);

// Same loss form over the decoder's own greedy states: candidates come from a
// finished resolve() trace, and a candidate is gold iff it contains a mention
// gold-coreferent with the current one.
OracleStates system_states(const GoldLabels& gold, const decoder::Resolution& res, int n_eps);

// Marginal negative log-likelihood summed over the steps; -1 when there are
// no mentions to score.
int loss_node(nn::Graph& g, model::DocScorer& scorer, const OracleStates& oracle);

struct StepResult {
  double loss = 0.0;
  bool skipped = false;
  std::string note;
};

class Trainer {
 public:
  Trainer(model::CorefModel& model, const model::RunConfig& cfg);

  // One optimization step over one document.
  StepResult step_once(const corpus::Document& doc);

  // Runs the full schedule: shuffled epochs, per-step log lines, periodic
  // checkpoints, and a held-out evaluation hook used to keep the best
  // checkpoint at the configured path. The hook may be empty.
  void run(const std::vector<corpus::Document>& train_docs,
           const std::function<double(long)>& dev_score, std::ostream& log);

  nn::Adam& optimizer() { return opt_; }
  long steps_taken() const { return opt_.steps_taken(); }

 private:
  model::CorefModel& model_;
  model::RunConfig cfg_;
  nn::Adam opt_;
  std::mt19937_64 rng_;
};

}  // namespace corank::trainer
