#include <cmath>
#include <set>

#include "corank/corpus/buckets.h"
#include "corank/decoder/resolver.h"
#include "doctest.h"
#include "oracles.h"

using namespace corank;
using corpus::NRType;
using decoder::ClusterState;
using decoder::ResolveOptions;
using model::DecodeMode;

TEST_CASE("epsilon class helpers") {
  CHECK(decoder::nr_class_count(3) == 1);
  CHECK(decoder::nr_class_count(7) == 5);
  CHECK(decoder::is_no_class(0));
  CHECK_FALSE(decoder::is_no_class(1));
  CHECK(decoder::is_dn_class(2, 3));
  CHECK(decoder::is_dn_class(6, 7));
  CHECK_FALSE(decoder::is_dn_class(2, 7));
  CHECK(decoder::is_nr_class(1, 3));
  CHECK_FALSE(decoder::is_nr_class(2, 3));
  CHECK(decoder::nr_type_of_class(1, 3) == NRType::NR);
  CHECK(decoder::nr_type_of_class(1, 7) == NRType::Expletive);
  CHECK(decoder::nr_type_of_class(2, 7) == NRType::Predicate);
  CHECK(decoder::nr_type_of_class(3, 7) == NRType::Quantifier);
  CHECK(decoder::nr_type_of_class(4, 7) == NRType::Coordination);
  CHECK(decoder::nr_type_of_class(5, 7) == NRType::Idiom);
}

namespace {

// tables rigged so mention i picks a known winner (see each case)
oracle::Tables blank_tables(int n, int ne = 3) {
  oracle::Tables t;
  t.n = n;
  t.ne = ne;
  t.sm.assign(n, 0.0);
  t.eps.assign(n, std::vector<double>(ne, 0.0));
  t.sal.assign(n, std::vector<double>(corpus::kNumSizeBuckets, 0.0));
  t.pair.assign(n, std::vector<double>(n, 0.0));
  t.size_term.assign(corpus::kNumSizeBuckets, 0.0);
  return t;
}

}  // namespace

TEST_CASE("state construction keeps attention and score identities") {
  auto t = blank_tables(3);
  t.sm = {0.4, -0.2, 0.9};
  t.sal = {{0.3, 0.1, 0, 0, 0, 0, 0, 0},
           {-0.5, 0.8, 0, 0, 0, 0, 0, 0},
           {0.2, -0.1, 0, 0, 0, 0, 0, 0}};
  oracle::TableScorer scorer(t);
  std::vector<ClusterState> states;

  int s0 = decoder::push_singleton(scorer, states, 0, 0);
  CHECK(states[s0].members == std::vector<int>{0});
  CHECK(states[s0].attn == std::vector<double>{1.0});
  CHECK(states[s0].s_c == doctest::Approx(0.4));
  CHECK(states[s0].beta == std::vector<double>{t.sal[0][0]});
  CHECK(states[s0].live);
  CHECK(states[s0].latest == s0);

  int s1 = decoder::push_attach(scorer, states, s0, 1);
  CHECK(states[s1].members == std::vector<int>{0, 1});
  CHECK_FALSE(states[s0].live);
  CHECK(states[s0].latest == s1);
  CHECK(states[s1].entity == states[s0].entity);

  // beta rows: member 0 at position 1, member 1 at position 2
  CHECK(states[s1].beta == std::vector<double>{t.sal[0][corpus::bucket_cluster_size(1)],
                                               t.sal[1][corpus::bucket_cluster_size(2)]});
  auto want_attn = oracle::softmax(states[s1].beta);
  CHECK(states[s1].attn[0] == doctest::Approx(want_attn[0]).epsilon(1e-12));
  CHECK(states[s1].attn[1] == doctest::Approx(want_attn[1]).epsilon(1e-12));
  double want_sc = want_attn[0] * 0.4 + want_attn[1] * -0.2;
  CHECK(states[s1].s_c == doctest::Approx(want_sc).epsilon(1e-12));

  // attaching to the retired version routes to the live one
  int s2 = decoder::push_attach(scorer, states, s0, 2);
  CHECK(states[s2].members == std::vector<int>{0, 1, 2});
  CHECK(decoder::latest_state(states, s0) == s2);
  CHECK(decoder::latest_state(states, s1) == s2);
  CHECK(decoder::latest_state(states, s2) == s2);
  CHECK_THROWS_AS(decoder::latest_state(states, 99), std::out_of_range);
  // path compression rewired the stale pointer
  CHECK(states[s0].latest == s2);
}

TEST_CASE("a three-mention chain resolves by hand") {
  // mention 0: DN wins; mention 1: cluster {0} wins; mention 2: NO wins
  auto t = blank_tables(3);
  t.eps = {{-5, -5, 1}, {-5, -5, -1}, {2, -5, -3}};
  t.pair = {{0, 0, 0}, {3, 0, 0}, {-9, -9, -9}};
  oracle::TableScorer scorer(t);

  auto res = decoder::resolve(scorer, {});
  REQUIRE(res.clusters.size() == 1);
  CHECK(res.clusters[0] == std::vector<int>{0, 1});
  CHECK(res.nonreferring.empty());  // class 0 spans are simply not mentions

  REQUIRE(res.trace.size() == 3);
  CHECK(res.trace[0].is_eps);
  CHECK(res.trace[0].eps_class == 2);
  CHECK_FALSE(res.trace[1].is_eps);
  CHECK(res.trace[1].score == doctest::Approx(3.0));  // sm + s_c + pair
  CHECK(res.trace[2].is_eps);
  CHECK(res.trace[2].eps_class == 0);

  // candidate bookkeeping: with history on, mention 2 saw both the singleton
  // version and the grown one
  CHECK(res.trace[2].candidates.size() == 2);
  CHECK(res.trace[2].scores.size() == 2);
  CHECK(res.trace[2].eps.size() == 3);
}

TEST_CASE("collapsed non-referring markables are emitted with the generic type") {
  auto t = blank_tables(2);
  t.eps = {{-1, 4, -1}, {-1, -1, 5}};
  oracle::TableScorer scorer(t);
  auto res = decoder::resolve(scorer, {});
  REQUIRE(res.nonreferring.size() == 1);
  CHECK(res.nonreferring[0] == std::pair<int, NRType>{0, NRType::NR});
  REQUIRE(res.clusters.size() == 1);
  CHECK(res.clusters[0] == std::vector<int>{1});
}

TEST_CASE("fine classes map onto their markable types") {
  auto t = blank_tables(5, 7);
  for (int i = 0; i < 5; ++i) t.eps[i][i + 1] = 3.0;  // classes 1..5 in turn
  oracle::TableScorer scorer(t);
  auto res = decoder::resolve(scorer, {});
  CHECK(res.clusters.empty());
  REQUIRE(res.nonreferring.size() == 5);
  CHECK(res.nonreferring[0] == std::pair<int, NRType>{0, NRType::Expletive});
  CHECK(res.nonreferring[1] == std::pair<int, NRType>{1, NRType::Predicate});
  CHECK(res.nonreferring[2] == std::pair<int, NRType>{2, NRType::Quantifier});
  CHECK(res.nonreferring[3] == std::pair<int, NRType>{3, NRType::Coordination});
  CHECK(res.nonreferring[4] == std::pair<int, NRType>{4, NRType::Idiom});
}

TEST_CASE("exact ties prefer discourse-new, then epsilon order, then newest cluster") {
  // everything scores zero: the first mention must go discourse-new
  auto t = blank_tables(2);
  oracle::TableScorer scorer(t);
  auto res = decoder::resolve(scorer, {});
  CHECK(res.trace[0].is_eps);
  CHECK(res.trace[0].eps_class == 2);
  // mention 1 again ties across DN, NO, NR and the {0} cluster: DN wins
  CHECK(res.trace[1].is_eps);
  CHECK(res.trace[1].eps_class == 2);
  CHECK(res.clusters.size() == 2);

  // with DN suppressed, NO beats NR on an exact tie
  auto t2 = blank_tables(1);
  t2.eps[0] = {1, 1, -9};
  oracle::TableScorer s2(t2);
  auto r2 = decoder::resolve(s2, {});
  CHECK(r2.trace[0].eps_class == 0);

  // clusters tie: the newest one wins
  auto t3 = blank_tables(3);
  t3.eps = {{-9, -9, 1}, {-9, -9, 1}, {-9, -9, -9}};
  oracle::TableScorer s3(t3);
  auto r3 = decoder::resolve(s3, {});
  REQUIRE_FALSE(r3.trace[2].is_eps);
  int chosen = r3.trace[2].state;
  // state holding mention 1 was created later
  bool has_m1 = false;
  for (int m : r3.states[chosen].members) has_m1 = has_m1 || m == 1;
  CHECK(has_m1);
}

TEST_CASE("history keeps superseded versions as candidates") {
  // mentions 0,1 cluster together; mention 2 prefers the singleton version
  // of {0} over the grown {0,1} version, whose attention mixes in the
  // heavily repellent member 1
  auto t = blank_tables(3);
  t.eps = {{-9, -9, 1}, {-9, -9, -9}, {-9, -9, 0}};
  t.pair = {{0, 0, 0}, {5, 0, 0}, {4, -9, 0}};
  // salience separates the versions: the two-member state mixes in member 1
  // whose pair term for mention 2 is heavily negative
  oracle::TableScorer scorer(t);

  ResolveOptions with_history;
  auto res = decoder::resolve(scorer, with_history);
  // mention 2 attaches to the historical singleton version, which routes to
  // the live cluster: everything ends up together
  REQUIRE(res.clusters.size() == 1);
  CHECK(res.clusters[0] == std::vector<int>{0, 1, 2});
  REQUIRE(res.trace.size() == 3);
  CHECK(res.trace[2].candidates.size() == 2);

  oracle::TableScorer scorer2(t);
  ResolveOptions without;
  without.history = false;
  auto res2 = decoder::resolve(scorer2, without);
  // only the live two-member version is visible now and it repels mention 2
  CHECK(res2.trace[2].candidates.size() == 1);
  REQUIRE(res2.clusters.size() == 2);
  CHECK(res2.clusters[0] == std::vector<int>{0, 1});
  CHECK(res2.clusters[1] == std::vector<int>{2});
}

TEST_CASE("the candidate window is capped and newest-first") {
  auto t = blank_tables(6);
  for (int i = 0; i < 6; ++i) t.eps[i] = {-9, -9, 1};  // everyone discourse-new
  oracle::TableScorer scorer(t);
  ResolveOptions opts;
  opts.max_clusters = 3;
  auto res = decoder::resolve(scorer, opts);
  const auto& last = res.trace[5];
  REQUIRE(last.candidates.size() == 3);
  // newest-first means the most recently created states come first
  CHECK(res.states[last.candidates[0]].newest_mention() == 4);
  CHECK(res.states[last.candidates[1]].newest_mention() == 3);
  CHECK(res.states[last.candidates[2]].newest_mention() == 2);
}

TEST_CASE("resolver matches the interpreter on random tables") {
  int checked = 0;
  for (uint64_t seed = 0; seed < 150; ++seed) {
    auto t = oracle::random_tables(seed, 6, seed % 3 == 2 ? 7 : 3);
    for (auto mode : {DecodeMode::Prefilter, DecodeMode::Hybrid, DecodeMode::Fine}) {
      for (bool history : {true, false}) {
        ResolveOptions opts;
        opts.mode = mode;
        opts.threshold = 0.5;
        opts.history = history;
        oracle::TableScorer scorer(t);
        auto got = decoder::resolve(scorer, opts);
        auto want = oracle::interpret_tables(t, mode, 0.5, history, opts.max_clusters);
        CAPTURE(seed);
        CAPTURE(static_cast<int>(mode));
        CAPTURE(history);
        CHECK(got.clusters == want.clusters);
        CHECK(got.nonreferring == want.nonreferring);
        ++checked;
      }
    }
  }
  CHECK(checked == 150 * 6);
}

TEST_CASE("without history each mention sees at most the live clusters") {
  for (uint64_t seed = 200; seed < 215; ++seed) {
    auto t = oracle::random_tables(seed, 6, 3);
    oracle::TableScorer scorer(t);
    ResolveOptions opts;
    opts.history = false;
    auto res = decoder::resolve(scorer, opts);
    std::set<int> entities;
    for (const auto& d : res.trace) {
      for (size_t k = 0; k < d.candidates.size(); ++k) {
        const auto& st = res.states[d.candidates[k]];
        // each entity shows up once: only its newest version is a candidate
        CHECK(entities.insert(st.entity).second);
      }
      entities.clear();
    }
  }
}

TEST_CASE("hybrid thresholding forces low-confidence epsilon picks") {
  // the NO class wins the argmax but with probability far below the bar,
  // so the mention is forced into the best cluster and remembered
  auto t = blank_tables(2);
  t.eps = {{-9, -9, 1}, {0.5, 0.2, 0.1}};
  t.pair = {{0, 0}, {0.4, 0}};
  oracle::TableScorer scorer(t);

  ResolveOptions opts;
  opts.mode = DecodeMode::Hybrid;
  opts.threshold = 0.9;
  auto res = decoder::resolve(scorer, opts);
  REQUIRE(res.trace.size() == 2);
  CHECK(res.trace[1].forced);
  CHECK(res.trace[1].remembered);
  // forced choice: best of discourse-new and the clusters
  CHECK_FALSE(res.trace[1].is_eps);
  REQUIRE(res.clusters.size() == 1);
  CHECK(res.clusters[0] == std::vector<int>{0, 1});

  // prefilter mode honors the same argmax instead
  oracle::TableScorer scorer2(t);
  auto pre = decoder::resolve(scorer2, {});
  CHECK(pre.clusters.size() == 1);
  CHECK(pre.clusters[0] == std::vector<int>{0});
}

TEST_CASE("postfiltering withdraws forced mentions that stay lonely") {
  // mention 1 is forced discourse-new (no cluster outscores it) with a
  // non-referring argmax; it ends as a singleton and is withdrawn
  auto t = blank_tables(2);
  t.eps = {{-9, -9, 1}, {0.1, 0.5, 0.2}};
  t.pair = {{0, 0}, {-20, 0}};
  oracle::TableScorer scorer(t);

  ResolveOptions opts;
  opts.mode = DecodeMode::Hybrid;
  opts.threshold = 0.9;
  auto res = decoder::resolve(scorer, opts);
  REQUIRE(res.clusters.size() == 1);  // only mention 0's cluster survives
  CHECK(res.clusters[0] == std::vector<int>{0});
  REQUIRE(res.nonreferring.size() == 1);
  CHECK(res.nonreferring[0] == std::pair<int, NRType>{1, NRType::NR});

  // but if a later mention joins it, the span stays a real cluster
  auto t3 = blank_tables(3);
  t3.eps = {{-9, -9, 1}, {0.1, 0.5, 0.2}, {-9, -9, -9}};
  t3.pair = {{0, 0, 0}, {-20, 0, 0}, {-20, 6, 0}};
  oracle::TableScorer scorer3(t3);
  auto res3 = decoder::resolve(scorer3, opts);
  REQUIRE(res3.clusters.size() == 2);
  CHECK(res3.clusters[1] == std::vector<int>{1, 2});
  CHECK(res3.nonreferring.empty());
}

TEST_CASE("degenerate inputs") {
  auto none = blank_tables(0);
  oracle::TableScorer s0(none);
  auto res0 = decoder::resolve(s0, {});
  CHECK(res0.clusters.empty());
  CHECK(res0.nonreferring.empty());
  CHECK(res0.trace.empty());

  auto one = blank_tables(1);
  one.eps[0] = {-1, -1, 2};
  oracle::TableScorer s1(one);
  auto res1 = decoder::resolve(s1, {});
  REQUIRE(res1.clusters.size() == 1);
  CHECK(res1.clusters[0] == std::vector<int>{0});
}

TEST_CASE("resolutions map back onto document spans") {
  corpus::Document src;
  src.doc_key = "nw/map#0";
  src.genre = "nw";
  src.speakers = {"s"};
  for (int i = 0; i < 6; ++i) src.tokens.push_back({"w" + std::to_string(i), 0, 0});

  auto t = blank_tables(3);
  t.eps = {{-9, -9, 1}, {-9, -9, -9}, {-9, 3, -9}};
  t.pair = {{0, 0, 0}, {5, 0, 0}, {0, 0, 0}};
  oracle::TableScorer scorer(t);
  auto res = decoder::resolve(scorer, {});

  std::vector<corpus::Span> kept = {{0, 0}, {2, 3}, {5, 5}};
  auto doc = decoder::resolution_to_document(res, kept, src);
  CHECK(doc.doc_key == src.doc_key);
  CHECK(doc.num_tokens() == 6);
  REQUIRE(doc.clusters.size() == 1);
  CHECK(doc.clusters[0] == std::vector<corpus::Span>{{0, 0}, {2, 3}});
  REQUIRE(doc.nonreferring.size() == 1);
  CHECK(doc.nonreferring[0] == std::pair<corpus::Span, NRType>{{5, 5}, NRType::NR});
}
