#pragma once

#include <map>
#include <string>
#include <vector>

#include "corank/corpus/document.h"

namespace corank::metrics {

struct PRF {
  double p = 0.0, r = 0.0, f1 = 0.0;
};

// Ratio with the 0/0 convention, and the harmonic mean built on it.
double safe_ratio(double num, double den);
PRF make_prf(double prec_num, double prec_den, double rec_num, double rec_den);

using Partition = std::vector<std::vector<corpus::Span>>;

// Hard error on a duplicate span; `where` names the document and side.
void check_partition(const Partition& partition, const std::string& where);

Partition drop_singletons(const Partition& partition);

// Count accumulators; corpora aggregate by summing these across documents.
struct MucCounts {
  double rec_num = 0, rec_den = 0, prec_num = 0, prec_den = 0;
  MucCounts& operator+=(const MucCounts& o);
};
struct B3Counts {
  double rec_num = 0, rec_den = 0, prec_num = 0, prec_den = 0;
  B3Counts& operator+=(const B3Counts& o);
};
struct CeafCounts {
  double phi = 0, key_entities = 0, response_entities = 0;
  CeafCounts& operator+=(const CeafCounts& o);
};
struct NRCounts {
  double tp = 0, fp = 0, fn = 0;
  NRCounts& operator+=(const NRCounts& o);
};

MucCounts muc_counts(const Partition& key, const Partition& response);
B3Counts b3_counts(const Partition& key, const Partition& response);
CeafCounts ceaf_counts(const Partition& key, const Partition& response);

PRF muc(const Partition& key, const Partition& response);
PRF b_cubed(const Partition& key, const Partition& response);
PRF ceaf_phi4(const Partition& key, const Partition& response);

PRF prf_from(const MucCounts& c);
PRF prf_from(const B3Counts& c);
PRF prf_from(const CeafCounts& c);
PRF prf_from(const NRCounts& c);

// Optimal one-to-one assignment of rows to columns minimizing total cost.
// Returns the column index per row (-1 when unmatched; only possible for
// rows > cols). O(n^2 m) shortest augmenting paths.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost);

using NRSet = std::vector<std::pair<corpus::Span, corpus::NRType>>;

// Exact span match; with `fine` the type must match too.
NRCounts nr_counts(const NRSet& gold, const NRSet& predicted, bool fine);

struct CorefScore {
  PRF muc, b3, ceaf;
  double conll = 0.0;  // mean of the three F1 values
};

struct EvalReport {
  CorefScore included;  // singletons kept
  CorefScore excluded;  // size-1 entities dropped from both sides
  PRF nr;
  std::map<corpus::NRType, PRF> nr_by_type;  // fine mode only
  bool nr_present = false;  // any non-referring markable on either side
  bool fine = false;
  double weighted_included = 0.0;  // 0.85 coref + 0.15 NR when NR present
  double weighted_excluded = 0.0;
  int documents = 0;
};

// Scores a response corpus against a key corpus. Documents are paired by
// doc_key; unpaired keys on either side or token-count disagreements are
// hard errors naming the offending documents.
EvalReport evaluate_corpus(const std::vector<corpus::Document>& key,
                           const std::vector<corpus::Document>& response, bool fine);

// Aligned plain-text tables; `singletons` picks "included", "excluded" or
// "both" blocks.
std::string render_report(const EvalReport& report, const std::string& singletons);

// Flat key/value lines for machine diffing.
std::string render_report_json(const EvalReport& report);

}  // namespace corank::metrics
