#pragma once

#include <vector>

#include "corank/corpus/document.h"
#include "corank/model/config.h"

namespace corank::decoder {

// One version of a cluster. Attaching a mention never mutates a state:
// it creates a new version and marks the old one superseded, so earlier
// versions can stay around as candidates when history is enabled.
struct ClusterState {
  int id = -1;
  int entity = -1;                 // chain identity shared by all versions
  std::vector<int> members;        // kept-mention indices in attachment order
  std::vector<double> beta;        // salience logit per member
  std::vector<double> attn;        // softmax(beta)
  std::vector<double> cstar;       // attention-weighted member representation
  double s_c = 0.0;                // attention-weighted member mention score
  int latest = -1;                 // state id of the newest version
  bool live = true;
  int payload = -1;                // scorer-side bundle id

  int size() const { return static_cast<int>(members.size()); }
  int newest_mention() const { return members.back(); }
};

// Everything the resolver needs to score a document. Epsilon classes are
// indexed 0 = not-a-mention, 1..n-2 = non-referring (one class collapsed, or
// five fine-grained types), n-1 = discourse-new; classes other than index 0
// include the mention score.
class ClusterScorer {
 public:
  virtual ~ClusterScorer() = default;
  virtual int num_mentions() const = 0;
  virtual int n_eps() const = 0;
  virtual double mention_score(int i) = 0;
  virtual std::vector<double> epsilon_scores(int i) = 0;
  virtual double salience_logit(int i, int position) = 0;  // 1-based position in cluster
  // Called once per new state after members/beta/attn/s_c are filled; may
  // record an aggregated representation in st.cstar and returns a payload id.
  virtual int make_payload(ClusterState& st) = 0;
  // The representation-dependent part of the pairwise score.
  virtual double pair_score(int i, const ClusterState& st) = 0;
};

int nr_class_count(int n_eps);
bool is_no_class(int k);
bool is_dn_class(int k, int n_eps);
bool is_nr_class(int k, int n_eps);
corpus::NRType nr_type_of_class(int k, int n_eps);

struct ResolveOptions {
  model::DecodeMode mode = model::DecodeMode::Prefilter;
  double threshold = 0.5;
  bool history = true;
  int max_clusters = 250;
};

struct Decision {
  int mention = -1;
  bool is_eps = false;
  int eps_class = -1;              // when is_eps
  int state = -1;                  // chosen candidate state id otherwise
  double score = 0.0;
  bool forced = false;             // low-confidence epsilon overridden
  bool remembered = false;         // span queued for postfiltering
  std::vector<int> candidates;     // candidate state ids, newest first
  std::vector<double> scores;      // parallel candidate scores
  std::vector<double> eps;         // epsilon scores
};

struct Resolution {
  std::vector<std::vector<int>> clusters;                    // mention indices, text order
  std::vector<std::pair<int, corpus::NRType>> nonreferring;  // mention index + type
  std::vector<Decision> trace;
  std::vector<ClusterState> states;                          // full version pool
};

// Resolves the live version of a state, compressing pointers along the way.
// Hard error for an unknown id.
int latest_state(std::vector<ClusterState>& states, int id);

// Appends a fresh singleton version holding mention m; returns its state id.
int push_singleton(ClusterScorer& scorer, std::vector<ClusterState>& states, int entity, int m);

// Appends the next version of state sid with mention m attached (the previous
// live version is retired); returns the new state id.
int push_attach(ClusterScorer& scorer, std::vector<ClusterState>& states, int sid, int m);

// Greedy cluster-ranking pass over the kept mentions in text order.
Resolution resolve(ClusterScorer& scorer, const ResolveOptions& opts);

// Maps a mention-index resolution onto document spans.
corpus::Document resolution_to_document(const Resolution& res, const std::vector<corpus::Span>& mentions,
                                        const corpus::Document& source);

}  // namespace corank::decoder
