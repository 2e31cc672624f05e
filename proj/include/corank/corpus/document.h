#pragma once

#include <string>
#include <utility>
#include <vector>

namespace corank::corpus {

// Inclusive token span [start, end] over a document's flat token sequence.
struct Span {
  int start = 0;
  int end = 0;

  int width() const { return end - start + 1; }
  bool operator==(const Span& o) const = default;
  auto operator<=>(const Span& o) const = default;
  bool contains(int t) const { return start <= t && t <= end; }
};

// True when the spans cross without nesting (one starts strictly inside the
// other and ends strictly after it).
bool partial_overlap(const Span& a, const Span& b);

// Non-referring markable types. NR is the collapsed label used when the
// fine distinctions are not modelled.
enum class NRType { NR, Expletive, Predicate, Quantifier, Coordination, Idiom };

std::string nr_type_name(NRType t);
NRType nr_type_from_name(const std::string& name);
constexpr int kNumFineNRTypes = 5;

struct Token {
  std::string text;
  int sentence = 0;
  int speaker = 0;  // index into Document::speakers
};

struct Document {
  std::string doc_key;
  std::string genre;
  std::vector<Token> tokens;
  std::vector<std::string> speakers;  // speaker id -> name
  std::vector<std::vector<Span>> clusters;
  std::vector<std::pair<Span, NRType>> nonreferring;

  int num_tokens() const { return static_cast<int>(tokens.size()); }
  int num_sentences() const;
  std::vector<std::pair<int, int>> sentence_ranges() const;  // [first, last] token per sentence
  std::vector<std::vector<std::string>> sentence_tokens() const;

  // Enforces the structural invariants: spans in range with start <= end,
  // clusters pairwise disjoint as span sets, no span both in a cluster and
  // in the nonreferring list. Throws on violation.
  void validate() const;
};

int speaker_id(Document& doc, const std::string& name);

}  // namespace corank::corpus
