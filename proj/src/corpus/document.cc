#include "corank/corpus/document.h"

#include <map>
#include <stdexcept>

namespace corank::corpus {

bool partial_overlap(const Span& a, const Span& b) {
  return (a.start < b.start && b.start <= a.end && a.end < b.end) ||
         (b.start < a.start && a.start <= b.end && b.end < a.end);
}

std::string nr_type_name(NRType t) {
  switch (t) {
    case NRType::NR: return "NR";
    case NRType::Expletive: return "Expletive";
    case NRType::Predicate: return "Predicate";
    case NRType::Quantifier: return "Quantifier";
    case NRType::Coordination: return "Coordination";
    case NRType::Idiom: return "Idiom";
  }
  throw std::logic_error("bad NRType");
}

NRType nr_type_from_name(const std::string& name) {
  if (name == "NR") return NRType::NR;
  if (name == "Expletive") return NRType::Expletive;
  if (name == "Predicate") return NRType::Predicate;
  if (name == "Quantifier") return NRType::Quantifier;
  if (name == "Coordination") return NRType::Coordination;
  if (name == "Idiom") return NRType::Idiom;
  throw std::invalid_argument("unknown non-referring type: " + name);
}

int Document::num_sentences() const {
  return tokens.empty() ? 0 : tokens.back().sentence + 1;
}

std::vector<std::pair<int, int>> Document::sentence_ranges() const {
  std::vector<std::pair<int, int>> out;
  for (int t = 0; t < num_tokens(); ++t) {
    if (out.empty() || tokens[t].sentence != tokens[t - 1].sentence)
      out.emplace_back(t, t);
    else
      out.back().second = t;
  }
  return out;
}

std::vector<std::vector<std::string>> Document::sentence_tokens() const {
  std::vector<std::vector<std::string>> out(num_sentences());
  for (const Token& t : tokens) out[t.sentence].push_back(t.text);
  return out;
}

void Document::validate() const {
  int n = num_tokens();
  auto check_span = [&](const Span& s, const std::string& what) {
    if (s.start < 0 || s.end >= n || s.start > s.end)
      throw std::runtime_error("document " + doc_key + ": " + what + " span [" + std::to_string(s.start) + "," +
                               std::to_string(s.end) + "] invalid for " + std::to_string(n) + " tokens");
  };
  for (int t = 1; t < n; ++t) {
    int d = tokens[t].sentence - tokens[t - 1].sentence;
    if (d != 0 && d != 1)
      throw std::runtime_error("document " + doc_key + ": sentence ids must be contiguous and non-decreasing");
  }
  for (const Token& t : tokens)
    if (t.speaker < 0 || t.speaker >= static_cast<int>(speakers.size()))
      throw std::runtime_error("document " + doc_key + ": token speaker id out of range");

  std::map<Span, int> owner;
  for (size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].empty()) throw std::runtime_error("document " + doc_key + ": empty cluster");
    for (const Span& s : clusters[c]) {
      check_span(s, "cluster");
      auto [it, fresh] = owner.emplace(s, static_cast<int>(c));
      if (!fresh)
        throw std::runtime_error("document " + doc_key + ": span [" + std::to_string(s.start) + "," +
                                 std::to_string(s.end) + "] appears in clusters " + std::to_string(it->second) +
                                 " and " + std::to_string(c));
    }
  }
  std::map<Span, NRType> nr_seen;
  for (const auto& [s, type] : nonreferring) {
    check_span(s, "nonreferring");
    if (owner.count(s))
      throw std::runtime_error("document " + doc_key + ": span [" + std::to_string(s.start) + "," +
                               std::to_string(s.end) + "] is both in a cluster and non-referring");
    if (!nr_seen.emplace(s, type).second)
      throw std::runtime_error("document " + doc_key + ": duplicate non-referring span [" +
                               std::to_string(s.start) + "," + std::to_string(s.end) + "]");
  }
}

int speaker_id(Document& doc, const std::string& name) {
  for (size_t i = 0; i < doc.speakers.size(); ++i)
    if (doc.speakers[i] == name) return static_cast<int>(i);
  doc.speakers.push_back(name);
  return static_cast<int>(doc.speakers.size()) - 1;
}

}  // namespace corank::corpus
