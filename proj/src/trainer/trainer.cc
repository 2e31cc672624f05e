#include "corank/trainer/trainer.h"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <map>
#include <numeric>
#include <stdexcept>

#include "corank/nn/checkpoint.h"

namespace corank::trainer {

corpus::Document strip_singletons_and_nonreferring(const corpus::Document& doc) {
  corpus::Document out = doc;
  out.nonreferring.clear();
  out.clusters.clear();
  for (const auto& cl : doc.clusters)
    if (cl.size() > 1) out.clusters.push_back(cl);
  return out;
}

std::vector<corpus::Document> split_document(const corpus::Document& doc, int max_tokens) {
  if (max_tokens <= 0 || doc.num_tokens() <= max_tokens) return {doc};
  auto ranges = doc.sentence_ranges();

  // greedy packing of whole sentences
  std::vector<std::pair<int, int>> pieces;  // token ranges, inclusive
  int begin = 0, end = -1;
  for (auto [first, last] : ranges) {
    if (end >= begin && last - begin + 1 > max_tokens) {
      pieces.emplace_back(begin, end);
      begin = first;
    }
    end = last;
  }
  pieces.emplace_back(begin, end);

  std::vector<corpus::Document> out;
  int first_sentence = 0;
  for (size_t p = 0; p < pieces.size(); ++p) {
    auto [t0, t1] = pieces[p];
    corpus::Document piece;
    piece.doc_key = doc.doc_key + "/" + std::to_string(p);
    piece.genre = doc.genre;
    piece.speakers = doc.speakers;
    for (int t = t0; t <= t1; ++t) {
      corpus::Token tok = doc.tokens[t];
      tok.sentence -= first_sentence;
      piece.tokens.push_back(std::move(tok));
    }
    for (const auto& cl : doc.clusters) {
      std::vector<corpus::Span> spans;
      for (const corpus::Span& s : cl)
        if (s.start >= t0 && s.end <= t1) spans.push_back({s.start - t0, s.end - t0});
      if (!spans.empty()) piece.clusters.push_back(std::move(spans));
    }
    for (const auto& [s, type] : doc.nonreferring)
      if (s.start >= t0 && s.end <= t1)
        piece.nonreferring.emplace_back(corpus::Span{s.start - t0, s.end - t0}, type);
    first_sentence += piece.num_sentences();
    piece.validate();
    out.push_back(std::move(piece));
  }
  return out;
}

namespace {

int nr_class_of_type(corpus::NRType type, int n_eps, const std::string& doc_key) {
  if (n_eps == 3) return 1;
  if (type == corpus::NRType::NR)
    throw std::runtime_error("document " + doc_key +
                             ": untyped non-referring markable under fine-grained classes");
  return static_cast<int>(type);
}

}  // namespace

GoldLabels gold_labels(const corpus::Document& doc, const std::vector<corpus::Span>& kept, int n_eps) {
  std::map<corpus::Span, int> entity_of;
  for (size_t c = 0; c < doc.clusters.size(); ++c)
    for (const corpus::Span& s : doc.clusters[c]) entity_of[s] = static_cast<int>(c);
  std::map<corpus::Span, corpus::NRType> nr_of;
  for (const auto& [s, type] : doc.nonreferring) nr_of[s] = type;

  GoldLabels out;
  for (const corpus::Span& s : kept) {
    auto e = entity_of.find(s);
    if (e != entity_of.end()) {
      out.entity.push_back(e->second);
      out.eps_class.push_back(n_eps - 1);  // discourse new
      continue;
    }
    out.entity.push_back(-1);
    auto nr = nr_of.find(s);
    out.eps_class.push_back(nr != nr_of.end() ? nr_class_of_type(nr->second, n_eps, doc.doc_key)
                                              : 0);
  }
  return out;
}

OracleStates build_oracle_states(decoder::ClusterScorer& scorer, const GoldLabels& gold,
                                 bool history, int max_clusters) {
  int n = scorer.num_mentions();
  int ne = scorer.n_eps();
  OracleStates out;
  std::map<int, int> live_of_entity;
  for (int i = 0; i < n; ++i) {
    OracleStep step;
    step.mention = i;
    for (int s = static_cast<int>(out.states.size()) - 1;
         s >= 0 && static_cast<int>(step.candidates.size()) < max_clusters; --s)
      if (history || out.states[s].live) step.candidates.push_back(s);

    int e = gold.entity[i];
    if (e >= 0)
      for (size_t k = 0; k < step.candidates.size(); ++k)
        if (out.states[step.candidates[k]].entity == e)
          step.gold.push_back(ne + static_cast<int>(k));
    if (step.gold.empty()) step.gold.push_back(gold.eps_class[i]);
    out.steps.push_back(std::move(step));

    if (e >= 0) {
      auto it = live_of_entity.find(e);
      if (it == live_of_entity.end())
        live_of_entity[e] = decoder::push_singleton(scorer, out.states, e, i);
      else
        it->second = decoder::push_attach(scorer, out.states, it->second, i);
    }
  }
  return out;
}

OracleStates system_states(const GoldLabels& gold, const decoder::Resolution& res, int n_eps) {
  OracleStates out;
  out.states = res.states;
  for (const decoder::Decision& d : res.trace) {
    OracleStep step;
    step.mention = d.mention;
    step.candidates = d.candidates;
    int e = gold.entity[d.mention];
    if (e >= 0)
      for (size_t k = 0; k < step.candidates.size(); ++k) {
        const decoder::ClusterState& st = out.states[step.candidates[k]];
        if (std::any_of(st.members.begin(), st.members.end(),
                        [&](int m) { return gold.entity[m] == e; }))
          step.gold.push_back(n_eps + static_cast<int>(k));
      }
    if (step.gold.empty()) step.gold.push_back(gold.eps_class[d.mention]);
    out.steps.push_back(std::move(step));
  }
  return out;
}

int loss_node(nn::Graph& g, model::DocScorer& scorer, const OracleStates& oracle) {
  std::vector<int> per_mention;
  for (const OracleStep& step : oracle.steps) {
    std::vector<int> all = scorer.epsilon_node_vec(step.mention);
    for (int sid : step.candidates)
      all.push_back(scorer.candidate_node(step.mention, oracle.states[sid]));
    if (step.gold.empty())
      throw std::logic_error("empty gold set for mention " + std::to_string(step.mention));
    std::vector<int> gold_nodes;
    for (int pos : step.gold) gold_nodes.push_back(all.at(pos));
    per_mention.push_back(
        g.sub(g.logsumexp(g.concat(all)), g.logsumexp(g.concat(gold_nodes))));
  }
  if (per_mention.empty()) return -1;
  return g.sum(per_mention);
}

Trainer::Trainer(model::CorefModel& model, const model::RunConfig& cfg)
    : model_(model),
      cfg_(cfg),
      opt_(nn::AdamConfig{cfg.train.learning_rate, cfg.train.adam_beta1, cfg.train.adam_beta2,
                          cfg.train.adam_eps, cfg.train.decay_rate, cfg.train.decay_frequency}),
      rng_(cfg.seed) {}

StepResult Trainer::step_once(const corpus::Document& doc) {
  StepResult r;
  nn::Graph g(true, &rng_);
  model::DocScorer scorer(g, model_, doc, model::score_and_prune(g, model_, doc));
  GoldLabels gold = gold_labels(doc, scorer.kept().spans, model_.config().n_eps());

  OracleStates oracle;
  if (cfg_.train.system_clusters) {
    decoder::ResolveOptions opts;
    opts.history = model_.config().cluster_history;
    opts.max_clusters = model_.config().max_clusters;
    oracle = system_states(gold, decoder::resolve(scorer, opts), model_.config().n_eps());
  } else {
    oracle = build_oracle_states(scorer, gold, model_.config().cluster_history,
                                 model_.config().max_clusters);
  }

  int loss = loss_node(g, scorer, oracle);
  if (loss < 0) {
    r.skipped = true;
    r.note = "no mentions kept";
    return r;
  }
  r.loss = g.scalar_value(loss);
  if (!std::isfinite(r.loss)) {
    r.skipped = true;
    r.note = "non-finite loss";
    return r;
  }
  model_.params().zero_grads();
  g.backward(loss);
  auto bad = opt_.step(model_.params());
  if (!bad.empty()) {
    r.note = "non-finite gradients skipped:";
    for (const auto& name : bad) r.note += " " + name;
  }
  return r;
}

namespace {

std::string timestamp() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", std::localtime(&t));
  return buf;
}

}  // namespace

void Trainer::run(const std::vector<corpus::Document>& train_docs,
                  const std::function<double(long)>& dev_score, std::ostream& log) {
  if (train_docs.empty()) throw std::invalid_argument("no training documents");
  const std::string& ckpt = cfg_.paths.checkpoint;
  auto save = [&](const std::string& path) {
    nn::save_checkpoint(path, model_.params(), &opt_, model::to_json_string(cfg_));
  };

  std::vector<int> order(train_docs.size());
  std::iota(order.begin(), order.end(), 0);
  double best = -1.0;
  long last_eval = -1;

  while (opt_.steps_taken() < cfg_.train.steps) {
    std::shuffle(order.begin(), order.end(), rng_);
    for (int d : order) {
      if (opt_.steps_taken() >= cfg_.train.steps) break;
      StepResult r = step_once(train_docs[d]);
      if (r.skipped) {
        log << "skip doc " << train_docs[d].doc_key << " (" << r.note << ")\n";
        continue;
      }
      long s = opt_.steps_taken();
      log << "step " << s << " loss " << r.loss << " lr " << opt_.learning_rate() << " "
          << timestamp() << "\n";
      if (!r.note.empty()) log << "step " << s << " " << r.note << "\n";
      if (!ckpt.empty() && cfg_.train.checkpoint_frequency > 0 &&
          s % cfg_.train.checkpoint_frequency == 0)
        save(dev_score ? ckpt + ".last" : ckpt);
      if (dev_score && cfg_.train.eval_frequency > 0 && s % cfg_.train.eval_frequency == 0) {
        double score = dev_score(s);
        last_eval = s;
        log << "eval step " << s << " dev " << score << "\n";
        if (score > best) {
          best = score;
          if (!ckpt.empty()) save(ckpt);
        }
      }
    }
  }

  long s = opt_.steps_taken();
  if (dev_score) {
    if (last_eval != s) {
      double score = dev_score(s);
      log << "eval step " << s << " dev " << score << "\n";
      if (score > best && !ckpt.empty()) save(ckpt);
    }
    if (!ckpt.empty()) save(ckpt + ".last");
  } else if (!ckpt.empty()) {
    save(ckpt);
  }
}

}  // namespace corank::trainer
