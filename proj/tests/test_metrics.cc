#include <cmath>
#include <random>
#include <set>

#include "corank/metrics/metrics.h"
#include "doctest.h"
#include "oracles.h"

using namespace corank;
using corpus::NRType;
using corpus::Span;
using metrics::Partition;

namespace {

Span sp(int t) { return {t, t}; }

// the worked three-mention example: key {a,b,c}, response {a,b} {c}
Partition fixture_key() { return {{sp(0), sp(1), sp(2)}}; }
Partition fixture_response() { return {{sp(0), sp(1)}, {sp(2)}}; }

corpus::Document make_doc(const std::string& key, int tokens, Partition clusters,
                          metrics::NRSet nr = {}) {
  corpus::Document d;
  d.doc_key = key;
  d.genre = "nw";
  d.speakers = {"-"};
  for (int t = 0; t < tokens; ++t) d.tokens.push_back({"w" + std::to_string(t), 0, 0});
  d.clusters = std::move(clusters);
  d.nonreferring = std::move(nr);
  return d;
}

}  // namespace

TEST_CASE("safe ratio and prf") {
  CHECK(metrics::safe_ratio(0, 0) == 0.0);
  CHECK(metrics::safe_ratio(3, 4) == doctest::Approx(0.75));
  auto prf = metrics::make_prf(1, 2, 1, 4);
  CHECK(prf.p == doctest::Approx(0.5));
  CHECK(prf.r == doctest::Approx(0.25));
  CHECK(prf.f1 == doctest::Approx(2 * 0.5 * 0.25 / 0.75));
  auto zero = metrics::make_prf(0, 0, 0, 5);
  CHECK(zero.f1 == 0.0);
}

TEST_CASE("worked example matches the known scores") {
  auto key = fixture_key(), resp = fixture_response();
  auto m = metrics::muc(key, resp);
  CHECK(m.r == doctest::Approx(0.5));
  CHECK(m.p == doctest::Approx(1.0));
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
  auto b = metrics::b_cubed(key, resp);
  CHECK(b.r == doctest::Approx(5.0 / 9.0));
  CHECK(b.p == doctest::Approx(1.0));
  CHECK(b.f1 == doctest::Approx(5.0 / 7.0));
  auto c = metrics::ceaf_phi4(key, resp);
  CHECK(c.r == doctest::Approx(0.8));
  CHECK(c.p == doctest::Approx(0.4));
  CHECK(c.f1 == doctest::Approx(0.8 / 1.5));
}

TEST_CASE("perfect response scores one across the board") {
  Partition p = {{sp(0), sp(3)}, {sp(1), sp(2), sp(5)}, {sp(7)}};
  for (auto prf : {metrics::muc(p, p), metrics::b_cubed(p, p), metrics::ceaf_phi4(p, p)}) {
    CHECK(prf.p == doctest::Approx(1.0));
    CHECK(prf.r == doctest::Approx(1.0));
    CHECK(prf.f1 == doctest::Approx(1.0));
  }
}

TEST_CASE("empty sides follow the zero convention") {
  Partition empty, some = {{sp(0), sp(1)}};
  for (auto prf : {metrics::muc(empty, empty), metrics::b_cubed(empty, empty),
                   metrics::ceaf_phi4(empty, empty)}) {
    CHECK(prf.p == 0.0);
    CHECK(prf.r == 0.0);
    CHECK(prf.f1 == 0.0);
  }
  CHECK(metrics::muc(some, empty).r == 0.0);
  CHECK(metrics::b_cubed(empty, some).p == 0.0);
  CHECK(metrics::ceaf_phi4(some, empty).f1 == 0.0);
  CHECK(std::isfinite(metrics::ceaf_phi4(empty, some).p));
}

TEST_CASE("scores agree with the reference scorers on random partitions") {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    auto pair = oracle::random_partitions(seed, 6);
    CAPTURE(seed);

    auto m = metrics::muc(pair.key, pair.response);
    auto mo = oracle::muc_reference(pair.key, pair.response);
    CHECK(m.p == doctest::Approx(mo.p).epsilon(1e-9));
    CHECK(m.r == doctest::Approx(mo.r).epsilon(1e-9));
    CHECK(m.f1 == doctest::Approx(mo.f1).epsilon(1e-9));

    auto b = metrics::b_cubed(pair.key, pair.response);
    auto bo = oracle::b3_reference(pair.key, pair.response);
    CHECK(b.p == doctest::Approx(bo.p).epsilon(1e-9));
    CHECK(b.r == doctest::Approx(bo.r).epsilon(1e-9));
    CHECK(b.f1 == doctest::Approx(bo.f1).epsilon(1e-9));

    auto c = metrics::ceaf_phi4(pair.key, pair.response);
    auto co = oracle::ceaf_reference(pair.key, pair.response);
    CHECK(c.p == doctest::Approx(co.p).epsilon(1e-9));
    CHECK(c.r == doctest::Approx(co.r).epsilon(1e-9));
    CHECK(c.f1 == doctest::Approx(co.f1).epsilon(1e-9));
  }
}

TEST_CASE("scores ignore entity order and span order") {
  auto pair = oracle::random_partitions(17, 5);
  auto shuffled = pair;
  std::mt19937_64 rng(3);
  std::shuffle(shuffled.key.begin(), shuffled.key.end(), rng);
  std::shuffle(shuffled.response.begin(), shuffled.response.end(), rng);
  for (auto& e : shuffled.key) std::shuffle(e.begin(), e.end(), rng);
  for (auto& e : shuffled.response) std::shuffle(e.begin(), e.end(), rng);

  CHECK(metrics::muc(pair.key, pair.response).f1 ==
        doctest::Approx(metrics::muc(shuffled.key, shuffled.response).f1));
  CHECK(metrics::b_cubed(pair.key, pair.response).f1 ==
        doctest::Approx(metrics::b_cubed(shuffled.key, shuffled.response).f1));
  CHECK(metrics::ceaf_phi4(pair.key, pair.response).f1 ==
        doctest::Approx(metrics::ceaf_phi4(shuffled.key, shuffled.response).f1));
}

TEST_CASE("dropping singletons never changes the link-based score") {
  for (uint64_t seed = 100; seed < 120; ++seed) {
    auto pair = oracle::random_partitions(seed, 5);
    auto with = metrics::muc(pair.key, pair.response);
    auto without =
        metrics::muc(metrics::drop_singletons(pair.key), metrics::drop_singletons(pair.response));
    CHECK(with.p == doctest::Approx(without.p).epsilon(1e-12));
    CHECK(with.r == doctest::Approx(without.r).epsilon(1e-12));
  }
}

TEST_CASE("drop_singletons keeps only entities of size two or more") {
  Partition p = {{sp(0)}, {sp(1), sp(2)}, {sp(3)}};
  auto d = metrics::drop_singletons(p);
  REQUIRE(d.size() == 1);
  CHECK(d[0].size() == 2);
}

TEST_CASE("duplicate spans in a partition are rejected") {
  Partition bad = {{sp(0), sp(1)}, {sp(1)}};
  CHECK_THROWS_WITH_AS(metrics::check_partition(bad, "doc x response"),
                       doctest::Contains("doc x response"), std::runtime_error);
  Partition dup_inside = {{sp(2), sp(2)}};
  CHECK_THROWS_AS(metrics::check_partition(dup_inside, "k"), std::runtime_error);
}

TEST_CASE("assignment solver finds the minimum cost matching") {
  // square case with a known optimum: 1+2+3 on the anti-diagonal
  std::vector<std::vector<double>> cost = {{9, 9, 1}, {9, 2, 9}, {3, 9, 9}};
  auto a = metrics::min_cost_assignment(cost);
  CHECK(a == std::vector<int>{2, 1, 0});

  // more rows than columns: one row stays unmatched
  std::vector<std::vector<double>> tall = {{5}, {1}, {3}};
  auto t = metrics::min_cost_assignment(tall);
  int matched = 0;
  for (size_t r = 0; r < t.size(); ++r)
    if (t[r] == 0) {
      ++matched;
      CHECK(r == 1);
    }
  CHECK(matched == 1);

  // random rectangles against brute force over column permutations
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  for (int rep = 0; rep < 30; ++rep) {
    int n = 1 + static_cast<int>(rng() % 5), m = 1 + static_cast<int>(rng() % 5);
    std::vector<std::vector<double>> c(n, std::vector<double>(m));
    for (auto& row : c)
      for (auto& x : row) x = val(rng);

    auto got = metrics::min_cost_assignment(c);
    double got_cost = 0;
    std::set<int> used;
    for (int r = 0; r < n; ++r)
      if (got[r] >= 0) {
        got_cost += c[r][got[r]];
        CHECK(used.insert(got[r]).second);
      }
    CHECK(static_cast<int>(used.size()) == std::min(n, m));

    // brute force: all injections of the smaller side into the larger
    double best = 1e18;
    if (n <= m) {
      std::vector<int> cols(m);
      std::iota(cols.begin(), cols.end(), 0);
      do {
        double s = 0;
        for (int r = 0; r < n; ++r) s += c[r][cols[r]];
        best = std::min(best, s);
      } while (std::next_permutation(cols.begin(), cols.end()));
    } else {
      std::vector<int> rows(n);
      std::iota(rows.begin(), rows.end(), 0);
      do {
        double s = 0;
        for (int j = 0; j < m; ++j) s += c[rows[j]][j];
        best = std::min(best, s);
      } while (std::next_permutation(rows.begin(), rows.end()));
    }
    CHECK(got_cost == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("non-referring counts respect the type flag") {
  metrics::NRSet gold = {{sp(0), NRType::Expletive}, {sp(2), NRType::Predicate}};
  metrics::NRSet pred = {{sp(0), NRType::Predicate}, {sp(3), NRType::Predicate}};

  auto collapsed = metrics::nr_counts(gold, pred, false);
  CHECK(collapsed.tp == 1);  // span 0 matches regardless of type
  CHECK(collapsed.fp == 1);
  CHECK(collapsed.fn == 1);

  auto fine = metrics::nr_counts(gold, pred, true);
  CHECK(fine.tp == 0);  // the type mismatch now costs both a fp and a fn
  CHECK(fine.fp == 2);
  CHECK(fine.fn == 2);
}

TEST_CASE("corpus evaluation pairs documents and aggregates micro counts") {
  std::vector<corpus::Document> key, resp;
  key.push_back(make_doc("a#0", 8, fixture_key()));
  key.push_back(make_doc("b#0", 8, {{sp(0), sp(1)}}));
  resp.push_back(make_doc("b#0", 8, {{sp(0), sp(1)}}));
  resp.push_back(make_doc("a#0", 8, fixture_response()));

  auto rep = metrics::evaluate_corpus(key, resp, false);
  CHECK(rep.documents == 2);
  CHECK_FALSE(rep.nr_present);
  CHECK(rep.weighted_included == doctest::Approx(rep.included.conll));

  // micro aggregation equals summing the counts by hand
  auto mc = metrics::muc_counts(fixture_key(), fixture_response());
  mc += metrics::muc_counts({{sp(0), sp(1)}}, {{sp(0), sp(1)}});
  auto expect = metrics::prf_from(mc);
  CHECK(rep.included.muc.f1 == doctest::Approx(expect.f1));
}

TEST_CASE("corpus evaluation errors name the offending documents") {
  std::vector<corpus::Document> key, resp;
  key.push_back(make_doc("a#0", 4, {}));
  resp.push_back(make_doc("a#0", 4, {}));

  auto dup = key;
  dup.push_back(make_doc("a#0", 4, {}));
  CHECK_THROWS_WITH_AS(metrics::evaluate_corpus(dup, resp, false), doctest::Contains("a#0"),
                       std::runtime_error);

  auto extra = resp;
  extra.push_back(make_doc("zz#1", 4, {}));
  CHECK_THROWS_WITH_AS(metrics::evaluate_corpus(key, extra, false), doctest::Contains("zz#1"),
                       std::runtime_error);

  std::vector<corpus::Document> missing_resp;
  CHECK_THROWS_WITH_AS(metrics::evaluate_corpus(key, missing_resp, false),
                       doctest::Contains("a#0"), std::runtime_error);

  auto short_resp = resp;
  short_resp[0].tokens.pop_back();
  CHECK_THROWS_WITH_AS(metrics::evaluate_corpus(key, short_resp, false), doctest::Contains("a#0"),
                       std::runtime_error);
}

TEST_CASE("weighted score blends coreference and non-referring when present") {
  std::vector<corpus::Document> key, resp;
  key.push_back(make_doc("a#0", 8, fixture_key(), {{sp(5), NRType::NR}, {sp(6), NRType::NR}}));
  resp.push_back(make_doc("a#0", 8, fixture_response(), {{sp(5), NRType::NR}}));

  auto rep = metrics::evaluate_corpus(key, resp, false);
  REQUIRE(rep.nr_present);
  CHECK(rep.nr.p == doctest::Approx(1.0));
  CHECK(rep.nr.r == doctest::Approx(0.5));
  CHECK(rep.nr.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(rep.weighted_included ==
        doctest::Approx(0.85 * rep.included.conll + 0.15 * rep.nr.f1));
  CHECK(rep.weighted_excluded ==
        doctest::Approx(0.85 * rep.excluded.conll + 0.15 * rep.nr.f1));

  // singleton-included vs excluded differ here: the response singleton {c}
  // vanishes from the excluded view
  CHECK(rep.included.ceaf.f1 != doctest::Approx(rep.excluded.ceaf.f1));
}

TEST_CASE("fine mode reports a per-type breakdown") {
  std::vector<corpus::Document> key, resp;
  key.push_back(make_doc("a#0", 8, {},
                         {{sp(0), NRType::Expletive}, {sp(1), NRType::Predicate}}));
  resp.push_back(make_doc("a#0", 8, {},
                          {{sp(0), NRType::Expletive}, {sp(1), NRType::Quantifier}}));

  auto rep = metrics::evaluate_corpus(key, resp, true);
  REQUIRE(rep.fine);
  CHECK(rep.nr_by_type.at(NRType::Expletive).f1 == doctest::Approx(1.0));
  CHECK(rep.nr_by_type.at(NRType::Predicate).r == doctest::Approx(0.0));
  CHECK(rep.nr_by_type.at(NRType::Quantifier).p == doctest::Approx(0.0));
}

TEST_CASE("report rendering mentions every metric block") {
  std::vector<corpus::Document> key, resp;
  key.push_back(make_doc("a#0", 8, fixture_key(), {{sp(5), NRType::NR}}));
  resp.push_back(make_doc("a#0", 8, fixture_response(), {{sp(5), NRType::NR}}));
  auto rep = metrics::evaluate_corpus(key, resp, false);

  auto text = metrics::render_report(rep, "both");
  for (const char* needle : {"MUC", "B3", "CEAF", "CoNLL", "non-referring"})
    CHECK(text.find(needle) != std::string::npos);
  auto included_only = metrics::render_report(rep, "included");
  CHECK(included_only.find("excluded") == std::string::npos);

  auto json = metrics::render_report_json(rep);
  CHECK(json.find("conll") != std::string::npos);
}
