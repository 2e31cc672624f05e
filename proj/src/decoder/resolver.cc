#include "corank/decoder/resolver.h"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "corank/nn/tensor.h"

namespace corank::decoder {

int nr_class_count(int n_eps) { return n_eps - 2; }
bool is_no_class(int k) { return k == 0; }
bool is_dn_class(int k, int n_eps) { return k == n_eps - 1; }
bool is_nr_class(int k, int n_eps) { return k > 0 && k < n_eps - 1; }

corpus::NRType nr_type_of_class(int k, int n_eps) {
  if (!is_nr_class(k, n_eps)) throw std::logic_error("class is not non-referring");
  if (n_eps == 3) return corpus::NRType::NR;
  switch (k) {
    case 1: return corpus::NRType::Expletive;
    case 2: return corpus::NRType::Predicate;
    case 3: return corpus::NRType::Quantifier;
    case 4: return corpus::NRType::Coordination;
    case 5: return corpus::NRType::Idiom;
  }
  throw std::logic_error("bad non-referring class index");
}

int latest_state(std::vector<ClusterState>& states, int id) {
  if (id < 0 || id >= static_cast<int>(states.size()))
    throw std::out_of_range("unknown cluster state id " + std::to_string(id));
  int root = id;
  while (states[root].latest != root) root = states[root].latest;
  for (int cur = id; states[cur].latest != root;) {
    int next = states[cur].latest;
    states[cur].latest = root;
    cur = next;
  }
  return root;
}

int push_singleton(ClusterScorer& scorer, std::vector<ClusterState>& states, int entity, int m) {
  ClusterState st;
  st.id = static_cast<int>(states.size());
  st.entity = entity;
  st.members = {m};
  st.beta = {scorer.salience_logit(m, 1)};
  st.attn = {1.0};
  st.s_c = scorer.mention_score(m);
  st.latest = st.id;
  states.push_back(std::move(st));
  states.back().payload = scorer.make_payload(states.back());
  return states.back().id;
}

int push_attach(ClusterScorer& scorer, std::vector<ClusterState>& states, int sid, int m) {
  int live_id = latest_state(states, sid);
  ClusterState ns;
  {
    const ClusterState& b = states[live_id];
    ns.id = static_cast<int>(states.size());
    ns.entity = b.entity;
    ns.members = b.members;
    ns.beta = b.beta;
  }
  ns.members.push_back(m);
  ns.beta.push_back(scorer.salience_logit(m, static_cast<int>(ns.members.size())));
  ns.attn = nn::softmax_values(ns.beta);
  ns.s_c = 0.0;
  for (size_t k = 0; k < ns.members.size(); ++k) ns.s_c += ns.attn[k] * scorer.mention_score(ns.members[k]);
  ns.latest = ns.id;
  states[live_id].live = false;
  states[live_id].latest = ns.id;
  states.push_back(std::move(ns));
  states.back().payload = scorer.make_payload(states.back());
  return states.back().id;
}

namespace {

struct Resolver {
  ClusterScorer& scorer;
  const ResolveOptions& opts;
  Resolution res;
  std::vector<int> entity_live;  // entity id -> live state id

  Resolver(ClusterScorer& s, const ResolveOptions& o) : scorer(s), opts(o) {}

  void new_singleton(int i) {
    int id = push_singleton(scorer, res.states, static_cast<int>(entity_live.size()), i);
    entity_live.push_back(id);
  }

  void attach(int i, int sid) {
    int id = push_attach(scorer, res.states, sid, i);
    entity_live[res.states[id].entity] = id;
  }

  Resolution run() {
    int n = scorer.num_mentions();
    int ne = scorer.n_eps();
    if (ne < 3) throw std::invalid_argument("need at least 3 epsilon classes");
    bool thresholded = opts.mode != model::DecodeMode::Prefilter;
    std::vector<std::pair<int, corpus::NRType>> remembered;

    for (int i = 0; i < n; ++i) {
      Decision d;
      d.mention = i;
      d.eps = scorer.epsilon_scores(i);
      if (static_cast<int>(d.eps.size()) != ne)
        throw std::logic_error("scorer returned wrong epsilon class count");
      double sm = scorer.mention_score(i);

      for (int s = static_cast<int>(res.states.size()) - 1;
           s >= 0 && static_cast<int>(d.candidates.size()) < opts.max_clusters; --s)
        if (opts.history || res.states[s].live) d.candidates.push_back(s);
      d.scores.resize(d.candidates.size());
      for (size_t k = 0; k < d.candidates.size(); ++k) {
        const ClusterState& st = res.states[d.candidates[k]];
        d.scores[k] = sm + st.s_c + scorer.pair_score(i, st);
      }

      // argmax; ties prefer discourse-new, then the other epsilon classes,
      // then the most recent cluster
      bool best_is_eps = true;
      int best_eps = ne - 1;
      double best = d.eps[ne - 1];
      int best_pos = -1;
      for (int k = 0; k < ne - 1; ++k)
        if (d.eps[k] > best) {
          best = d.eps[k];
          best_eps = k;
        }
      for (size_t k = 0; k < d.candidates.size(); ++k)
        if (d.scores[k] > best) {
          best = d.scores[k];
          best_is_eps = false;
          best_pos = static_cast<int>(k);
        }

      d.score = best;
      if (!best_is_eps) {
        d.state = d.candidates[best_pos];
        attach(i, d.state);
      } else if (is_dn_class(best_eps, ne)) {
        d.is_eps = true;
        d.eps_class = best_eps;
        new_singleton(i);
      } else {
        d.is_eps = true;
        d.eps_class = best_eps;
        bool honored = true;
        if (thresholded) {
          std::vector<double> all = d.eps;
          all.insert(all.end(), d.scores.begin(), d.scores.end());
          honored = nn::softmax_values(all)[best_eps] > opts.threshold;
        }
        if (honored) {
          if (is_nr_class(best_eps, ne))
            res.nonreferring.emplace_back(i, nr_type_of_class(best_eps, ne));
        } else {
          d.forced = true;
          d.remembered = true;
          int bt = 1;
          for (int k = 2; k < ne - 1; ++k)
            if (d.eps[k] > d.eps[bt]) bt = k;
          remembered.emplace_back(i, nr_type_of_class(bt, ne));
          // best choice that keeps the span in the discourse model
          bool forced_eps = true;
          double fb = d.eps[ne - 1];
          int fpos = -1;
          for (size_t k = 0; k < d.candidates.size(); ++k)
            if (d.scores[k] > fb) {
              fb = d.scores[k];
              forced_eps = false;
              fpos = static_cast<int>(k);
            }
          d.score = fb;
          if (forced_eps) {
            d.eps_class = ne - 1;
            new_singleton(i);
          } else {
            d.is_eps = false;
            d.eps_class = -1;
            d.state = d.candidates[fpos];
            attach(i, d.state);
          }
        }
      }
      res.trace.push_back(std::move(d));
    }

    // postfiltering: a remembered span whose forced singleton never grew is
    // withdrawn from the partition and emitted as a non-referring markable
    std::set<int> dropped_states;
    for (const auto& [m, type] : remembered) {
      for (int s = 0; s < static_cast<int>(res.states.size()); ++s) {
        const ClusterState& st = res.states[s];
        if (st.live && st.size() == 1 && st.members[0] == m) {
          dropped_states.insert(s);
          res.nonreferring.emplace_back(m, type);
          break;
        }
      }
    }
    for (const ClusterState& st : res.states)
      if (st.live && !dropped_states.count(st.id)) res.clusters.push_back(st.members);
    std::sort(res.clusters.begin(), res.clusters.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    std::sort(res.nonreferring.begin(), res.nonreferring.end());
    return std::move(res);
  }
};

}  // namespace

Resolution resolve(ClusterScorer& scorer, const ResolveOptions& opts) {
  Resolver r(scorer, opts);
  return r.run();
}

corpus::Document resolution_to_document(const Resolution& res, const std::vector<corpus::Span>& mentions,
                                        const corpus::Document& source) {
  corpus::Document out;
  out.doc_key = source.doc_key;
  out.genre = source.genre;
  out.tokens = source.tokens;
  out.speakers = source.speakers;
  for (const auto& cl : res.clusters) {
    std::vector<corpus::Span> spans;
    for (int m : cl) spans.push_back(mentions.at(m));
    out.clusters.push_back(std::move(spans));
  }
  for (const auto& [m, type] : res.nonreferring) out.nonreferring.emplace_back(mentions.at(m), type);
  out.validate();
  return out;
}

}  // namespace corank::decoder
