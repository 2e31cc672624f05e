#include "corank/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "nlohmann/json.hpp"

namespace corank::metrics {

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

PRF make_prf(double prec_num, double prec_den, double rec_num, double rec_den) {
  PRF out;
  out.p = safe_ratio(prec_num, prec_den);
  out.r = safe_ratio(rec_num, rec_den);
  out.f1 = safe_ratio(2 * out.p * out.r, out.p + out.r);
  return out;
}

void check_partition(const Partition& partition, const std::string& where) {
  std::set<corpus::Span> seen;
  for (const auto& entity : partition)
    for (const corpus::Span& s : entity)
      if (!seen.insert(s).second)
        throw std::runtime_error(where + ": span [" + std::to_string(s.start) + "," +
                                 std::to_string(s.end) + "] appears twice");
}

Partition drop_singletons(const Partition& partition) {
  Partition out;
  for (const auto& entity : partition)
    if (entity.size() > 1) out.push_back(entity);
  return out;
}

MucCounts& MucCounts::operator+=(const MucCounts& o) {
  rec_num += o.rec_num, rec_den += o.rec_den, prec_num += o.prec_num, prec_den += o.prec_den;
  return *this;
}
B3Counts& B3Counts::operator+=(const B3Counts& o) {
  rec_num += o.rec_num, rec_den += o.rec_den, prec_num += o.prec_num, prec_den += o.prec_den;
  return *this;
}
CeafCounts& CeafCounts::operator+=(const CeafCounts& o) {
  phi += o.phi, key_entities += o.key_entities, response_entities += o.response_entities;
  return *this;
}
NRCounts& NRCounts::operator+=(const NRCounts& o) {
  tp += o.tp, fp += o.fp, fn += o.fn;
  return *this;
}

namespace {

using SpanSet = std::set<corpus::Span>;

std::vector<SpanSet> as_sets(const Partition& p) {
  std::vector<SpanSet> out;
  for (const auto& entity : p) out.emplace_back(entity.begin(), entity.end());
  return out;
}

int intersection_size(const SpanSet& a, const SpanSet& b) {
  const SpanSet& small = a.size() <= b.size() ? a : b;
  const SpanSet& large = a.size() <= b.size() ? b : a;
  int n = 0;
  for (const corpus::Span& s : small) n += large.count(s);
  return n;
}

// One side of the MUC fraction: how many parts each key entity is cut into
// by the response, counting unaligned mentions as singleton parts.
void muc_side(const std::vector<SpanSet>& key, const std::vector<SpanSet>& response, double& num,
              double& den) {
  for (const SpanSet& k : key) {
    int parts = 0, aligned = 0;
    for (const SpanSet& r : response) {
      int common = intersection_size(k, r);
      if (common > 0) ++parts;
      aligned += common;
    }
    parts += static_cast<int>(k.size()) - aligned;  // leftovers
    num += static_cast<double>(k.size() - parts);
    den += static_cast<double>(k.size() - 1);
  }
}

void b3_side(const std::vector<SpanSet>& key, const std::vector<SpanSet>& response, double& num,
             double& den) {
  for (const SpanSet& k : key) {
    for (const SpanSet& r : response) {
      double common = intersection_size(k, r);
      num += common * common / static_cast<double>(k.size());
    }
    den += static_cast<double>(k.size());
  }
}

}  // namespace

MucCounts muc_counts(const Partition& key, const Partition& response) {
  auto k = as_sets(key), r = as_sets(response);
  MucCounts c;
  muc_side(k, r, c.rec_num, c.rec_den);
  muc_side(r, k, c.prec_num, c.prec_den);
  return c;
}

B3Counts b3_counts(const Partition& key, const Partition& response) {
  auto k = as_sets(key), r = as_sets(response);
  B3Counts c;
  b3_side(k, r, c.rec_num, c.rec_den);
  b3_side(r, k, c.prec_num, c.prec_den);
  return c;
}

std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  int m = static_cast<int>(cost[0].size());
  if (n > m) {  // transpose so rows fit into columns
    std::vector<std::vector<double>> t(m, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) t[j][i] = cost[i][j];
    std::vector<int> col_to_row = min_cost_assignment(t);
    std::vector<int> row_to_col(n, -1);
    for (int j = 0; j < m; ++j)
      if (col_to_row[j] >= 0) row_to_col[col_to_row[j]] = j;
    return row_to_col;
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= m; ++j)
        if (!used[j]) {
          double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
          if (cur < minv[j]) minv[j] = cur, way[j] = j0;
          if (minv[j] < delta) delta = minv[j], j1 = j;
        }
      for (int j = 0; j <= m; ++j) {
        if (used[j])
          u[p[j]] += delta, v[j] -= delta;
        else
          minv[j] -= delta;
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

CeafCounts ceaf_counts(const Partition& key, const Partition& response) {
  auto k = as_sets(key), r = as_sets(response);
  CeafCounts c;
  c.key_entities = static_cast<double>(k.size());
  c.response_entities = static_cast<double>(r.size());
  if (k.empty() || r.empty()) return c;
  std::vector<std::vector<double>> cost(k.size(), std::vector<double>(r.size()));
  for (size_t i = 0; i < k.size(); ++i)
    for (size_t j = 0; j < r.size(); ++j)
      cost[i][j] = -2.0 * intersection_size(k[i], r[j]) /
                   static_cast<double>(k[i].size() + r[j].size());
  std::vector<int> match = min_cost_assignment(cost);
  for (size_t i = 0; i < match.size(); ++i)
    if (match[i] >= 0) c.phi -= cost[i][match[i]];
  return c;
}

PRF prf_from(const MucCounts& c) { return make_prf(c.prec_num, c.prec_den, c.rec_num, c.rec_den); }
PRF prf_from(const B3Counts& c) { return make_prf(c.prec_num, c.prec_den, c.rec_num, c.rec_den); }
PRF prf_from(const CeafCounts& c) {
  return make_prf(c.phi, c.response_entities, c.phi, c.key_entities);
}
PRF prf_from(const NRCounts& c) {
  return make_prf(c.tp, c.tp + c.fp, c.tp, c.tp + c.fn);
}

PRF muc(const Partition& key, const Partition& response) { return prf_from(muc_counts(key, response)); }
PRF b_cubed(const Partition& key, const Partition& response) { return prf_from(b3_counts(key, response)); }
PRF ceaf_phi4(const Partition& key, const Partition& response) { return prf_from(ceaf_counts(key, response)); }

NRCounts nr_counts(const NRSet& gold, const NRSet& predicted, bool fine) {
  auto shape = [&](const NRSet& xs) {
    std::set<std::pair<corpus::Span, int>> out;
    for (const auto& [s, type] : xs) out.emplace(s, fine ? static_cast<int>(type) : 0);
    return out;
  };
  auto g = shape(gold), p = shape(predicted);
  NRCounts c;
  for (const auto& x : p)
    (g.count(x) ? c.tp : c.fp) += 1.0;
  for (const auto& x : g)
    if (!p.count(x)) c.fn += 1.0;
  return c;
}

namespace {

struct CorefAccum {
  MucCounts muc;
  B3Counts b3;
  CeafCounts ceaf;

  void add(const Partition& key, const Partition& response) {
    muc += muc_counts(key, response);
    b3 += b3_counts(key, response);
    ceaf += ceaf_counts(key, response);
  }

  CorefScore score() const {
    CorefScore s;
    s.muc = prf_from(muc);
    s.b3 = prf_from(b3);
    s.ceaf = prf_from(ceaf);
    s.conll = (s.muc.f1 + s.b3.f1 + s.ceaf.f1) / 3.0;
    return s;
  }
};

}  // namespace

EvalReport evaluate_corpus(const std::vector<corpus::Document>& key,
                           const std::vector<corpus::Document>& response, bool fine) {
  std::map<std::string, const corpus::Document*> by_key;
  for (const corpus::Document& d : key)
    if (!by_key.emplace(d.doc_key, &d).second)
      throw std::runtime_error("duplicate key document " + d.doc_key);

  std::set<std::string> unmatched;
  for (const auto& [name, _] : by_key) unmatched.insert(name);

  EvalReport report;
  report.fine = fine;
  CorefAccum included, excluded;
  NRCounts nr_total;
  std::map<corpus::NRType, NRCounts> nr_typed;

  for (const corpus::Document& resp : response) {
    auto it = by_key.find(resp.doc_key);
    if (it == by_key.end())
      throw std::runtime_error("response document " + resp.doc_key + " has no key document");
    unmatched.erase(resp.doc_key);
    const corpus::Document& gold = *it->second;
    if (gold.num_tokens() != resp.num_tokens())
      throw std::runtime_error("document " + resp.doc_key + ": key has " +
                               std::to_string(gold.num_tokens()) + " tokens, response " +
                               std::to_string(resp.num_tokens()));
    check_partition(gold.clusters, "key document " + gold.doc_key);
    check_partition(resp.clusters, "response document " + resp.doc_key);

    included.add(gold.clusters, resp.clusters);
    excluded.add(drop_singletons(gold.clusters), drop_singletons(resp.clusters));

    nr_total += nr_counts(gold.nonreferring, resp.nonreferring, fine);
    if (fine) {
      auto restrict_to = [](const NRSet& xs, corpus::NRType t) {
        NRSet out;
        for (const auto& x : xs)
          if (x.second == t) out.push_back(x);
        return out;
      };
      std::set<corpus::NRType> types;
      for (const auto& [s, t] : gold.nonreferring) types.insert(t);
      for (const auto& [s, t] : resp.nonreferring) types.insert(t);
      for (corpus::NRType t : types)
        nr_typed[t] += nr_counts(restrict_to(gold.nonreferring, t),
                                 restrict_to(resp.nonreferring, t), true);
    }
    report.nr_present = report.nr_present || !gold.nonreferring.empty() || !resp.nonreferring.empty();
    ++report.documents;
  }

  if (!unmatched.empty()) {
    std::string names;
    for (const std::string& n : unmatched) names += (names.empty() ? "" : ", ") + n;
    throw std::runtime_error("key documents with no response: " + names);
  }

  report.included = included.score();
  report.excluded = excluded.score();
  report.nr = prf_from(nr_total);
  for (const auto& [t, c] : nr_typed) report.nr_by_type[t] = prf_from(c);
  auto weighted = [&](const CorefScore& s) {
    return report.nr_present ? 0.85 * s.conll + 0.15 * report.nr.f1 : s.conll;
  };
  report.weighted_included = weighted(report.included);
  report.weighted_excluded = weighted(report.excluded);
  return report;
}

namespace {

std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%6.2f", 100.0 * x);
  return buf;
}

void render_block(std::ostringstream& os, const std::string& title, const CorefScore& s,
                  double weighted, const EvalReport& report) {
  os << title << "\n";
  os << "  metric         P       R      F1\n";
  os << "  MUC       " << pct(s.muc.p) << "  " << pct(s.muc.r) << "  " << pct(s.muc.f1) << "\n";
  os << "  B3        " << pct(s.b3.p) << "  " << pct(s.b3.r) << "  " << pct(s.b3.f1) << "\n";
  os << "  CEAF-phi4 " << pct(s.ceaf.p) << "  " << pct(s.ceaf.r) << "  " << pct(s.ceaf.f1) << "\n";
  os << "  CoNLL average F1: " << pct(s.conll) << "\n";
  if (report.nr_present) os << "  weighted F1:      " << pct(weighted) << "\n";
}

}  // namespace

std::string render_report(const EvalReport& report, const std::string& singletons) {
  std::ostringstream os;
  os << "documents: " << report.documents << "\n";
  if (singletons != "excluded")
    render_block(os, "singletons included", report.included, report.weighted_included, report);
  if (singletons != "included")
    render_block(os, "singletons excluded", report.excluded, report.weighted_excluded, report);
  if (report.nr_present) {
    os << "non-referring\n";
    os << "  all       " << pct(report.nr.p) << "  " << pct(report.nr.r) << "  "
       << pct(report.nr.f1) << "\n";
    for (const auto& [t, prf] : report.nr_by_type)
      os << "  " << corpus::nr_type_name(t) << std::string(std::max<size_t>(1, 10 - corpus::nr_type_name(t).size()), ' ')
         << pct(prf.p) << "  " << pct(prf.r) << "  " << pct(prf.f1) << "\n";
  }
  return os.str();
}

std::string render_report_json(const EvalReport& report) {
  nlohmann::json j;
  auto put = [](nlohmann::json& o, const PRF& v) {
    o = {{"p", v.p}, {"r", v.r}, {"f1", v.f1}};
  };
  auto block = [&](const CorefScore& s, double weighted) {
    nlohmann::json o;
    put(o["muc"], s.muc);
    put(o["b3"], s.b3);
    put(o["ceaf_phi4"], s.ceaf);
    o["conll"] = s.conll;
    o["weighted"] = weighted;
    return o;
  };
  j["documents"] = report.documents;
  j["singletons_included"] = block(report.included, report.weighted_included);
  j["singletons_excluded"] = block(report.excluded, report.weighted_excluded);
  j["nr_present"] = report.nr_present;
  put(j["nr"], report.nr);
  if (report.fine) {
    nlohmann::json types;
    for (const auto& [t, prf] : report.nr_by_type) put(types[corpus::nr_type_name(t)], prf);
    j["nr_by_type"] = std::move(types);
  }
  return j.dump(2);
}

}  // namespace corank::metrics
