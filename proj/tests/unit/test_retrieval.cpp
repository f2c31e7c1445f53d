#include <gtest/gtest.h>

#include "support.hpp"

namespace held {
namespace {

using namespace test;

// Same texts as tests/oracles/bm25_oracle.py.
const std::vector<std::string> kToyPassages = {
    "Annual report 2015",
    "1. Overview",
    "The company designs storage systems for data centers.",
    "Revenue grew in every region, led by storage sales.",
    "1.1 History",
    "Founded in 1998, the company listed its shares in 2004.",
    "2. Risk factors",
    "Liquidity risk: cash reserves may not cover debt.",
    "Market risk from currency movements affects revenue.",
    "2.1 Liquidity",
    "Cash and cash equivalents fell to 12 million.",
    "The company expects cash flow to recover.",
    "2.2 Credit",
    "Credit risk is concentrated in three customers.",
    "3. Outlook",
    "Storage demand should keep growing next year.",
    "",
    "Risk risk risk.",
    "Data data centers centers storage.",
    "Notes to the accounts",
};

const std::vector<std::vector<std::string>> kToyQueries = {
    {"cash", "risk"}, {"storage", "revenue", "storage"}, {"company", "the", "missing"}};

// Output of tests/oracles/bm25_oracle.py.
const std::vector<std::vector<double>> kToyBm25 = {
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.2459755062728433, 2.1462649928442685, 0.899068172739801, 0.0,
     1.907859839145336, 1.3965888149660175, 0.0, 0.899068172739801, 0.0, 0.0, 0.0, 1.785706831570757, 0.0, 0.0},
    {0.0, 0.0, 1.0540820738930967, 2.514226794589214, 0.0, 0.0, 0.0, 0.0, 1.7367831092310593, 0.0, 0.0, 0.0,
     0.0, 0.0, 0.0, 1.1274520558346115, 0.0, 0.0, 1.3097893155383222, 0.0},
    {0.0, 0.0, 2.3597865841975514, 0.0, 0.0, 2.088026133042363, 0.0, 0.0, 0.0, 0.0, 0.0, 2.524040870800629,
     0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.4250200471106087},
};

TEST(Tokenize, LowercasesAndSplitsCjkPerCharacter) {
  EXPECT_EQ(tokenize("Cash-Flow 2015!"), (std::vector<std::string>{"cash", "flow", "2015"}));
  EXPECT_EQ(tokenize("一、风险因素 risk"), (std::vector<std::string>{"一", "风", "险", "因", "素", "risk"}));
  EXPECT_TRUE(tokenize("  ... ").empty());
}

TEST(Bm25, MatchesIndependentCalculator) {
  const DocStats stats(text_document(kToyPassages));
  for (std::size_t q = 0; q < kToyQueries.size(); ++q)
    for (std::size_t p = 0; p < kToyPassages.size(); ++p)
      EXPECT_NEAR(bm25(kToyQueries[q], static_cast<NodeId>(p), stats), kToyBm25[q][p], 1e-9) << q << " " << p;
}

TEST(Bm25, AbsentTermsAndEmptyPassagesScoreZero) {
  const DocStats stats(text_document(kToyPassages));
  EXPECT_EQ(bm25({"nothing"}, 2, stats), 0.0);
  EXPECT_EQ(bm25({"risk"}, 16, stats), 0.0);
  EXPECT_EQ(bm25({}, 2, stats), 0.0);
}

TEST(Bm25, IdenticalPassagesScoreIdentically) {
  const DocStats stats(text_document({"cash risk", "other words here", "cash risk", "filler", "more filler", "last one"}));
  EXPECT_EQ(bm25({"cash"}, 0, stats), bm25({"cash"}, 2, stats));
  EXPECT_GT(bm25({"cash"}, 0, stats), 0.0);
}

// Brute-force feature oracles over plain parent arrays and token lists.
std::vector<NodeId> ancestors_of(const std::vector<NodeId>& parents, NodeId v) {
  std::vector<NodeId> out;
  for (NodeId a = parents[static_cast<std::size_t>(v)]; a != kRootId; a = parents[static_cast<std::size_t>(a)])
    out.push_back(a);
  return out;
}

Document random_text_document(Rng& rng, std::size_t n) {
  static const std::vector<std::string> words = {"cash", "risk", "credit", "storage", "revenue", "market",
                                                 "debt", "growth", "the", "of", "and", "report"};
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < n; ++i) {
    std::string t;
    const int len = rng.uniform_int(0, 8);
    for (int k = 0; k < len; ++k) t += words[static_cast<std::size_t>(rng.uniform_int(0, 11))] + " ";
    texts.push_back(t);
  }
  return text_document(texts);
}

TEST(HierarchyFeatures, MatchBruteForceOnRandomCases) {
  Rng rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 30));
    const auto parents = random_parents(n, rng, 0.3);
    const auto tree = HierarchyTree::from_parents(parents);
    const auto doc = random_text_document(rng, n);
    const DocStats stats(doc);
    const std::vector<std::string> query = {"cash", "risk", "growth"};
    for (std::size_t i = 0; i < n; ++i) {
      const NodeId v = static_cast<NodeId>(i);
      const auto anc = ancestors_of(parents, v);
      double best = 0.0;
      std::set<std::string> anc_words;
      for (NodeId x : anc) {
        best = std::max(best, bm25(query, x, stats));
        for (const auto& w : tokenize(doc.objects[static_cast<std::size_t>(x)].text)) anc_words.insert(w);
      }
      std::set<std::string> own;
      for (const auto& w : tokenize(doc.objects[i].text)) own.insert(w);
      int shared = 0;
      for (const auto& w : own) shared += anc_words.count(w) > 0;
      std::vector<NodeId> sibs;
      for (std::size_t k = 0; k < n; ++k)
        if (parents[k] == parents[i]) sibs.push_back(static_cast<NodeId>(k));
      const int pos = static_cast<int>(std::find(sibs.begin(), sibs.end(), v) - sibs.begin()) + 1;

      const auto f = passage_features(query, v, tree, stats);
      EXPECT_EQ(f.bm25, bm25(query, v, stats));
      EXPECT_EQ(f.bm25_anc_max, best);
      EXPECT_EQ(f.same_word_anc, shared);
      EXPECT_EQ(f.pos, pos);
      EXPECT_EQ(f.pos_ratio, static_cast<double>(pos) / static_cast<double>(sibs.size()));
      EXPECT_GT(f.pos_ratio, 0.0);
      EXPECT_LE(f.pos_ratio, 1.0);
    }
  }
}

TEST(HierarchyFeatures, PassageUnderRootHasNoAncestorSignal) {
  const auto doc = text_document({"cash risk", "cash risk"});
  const DocStats stats(doc);
  const auto tree = HierarchyTree::from_parents(std::vector<NodeId>{kRootId, kRootId});
  EXPECT_EQ(bm25_anc_max({"cash"}, 1, tree, stats), 0.0);
  EXPECT_EQ(same_word_anc(1, tree, stats), 0);
}

TEST(HierarchyFeatures, HeadingWithAllTermsGivesItsScore) {
  const auto doc = text_document({"2. Liquidity risk", "Cash is short.", "Cash reserves", "Other text"});
  const DocStats stats(doc);
  const auto tree = HierarchyTree::from_parents(std::vector<NodeId>{kRootId, 0, 0, 2});
  const std::vector<std::string> q = {"liquidity", "risk"};
  EXPECT_EQ(bm25_anc_max(q, 1, tree, stats), bm25(q, 0, stats));
  EXPECT_EQ(bm25_anc_max(q, 3, tree, stats), bm25(q, 0, stats));
}

TEST(HierarchyFeatures, VerbatimHeadingRepeat) {
  const auto doc = text_document({"Credit risk credit", "Credit risk credit"});
  const auto tree = HierarchyTree::from_parents(std::vector<NodeId>{kRootId, 0});
  EXPECT_EQ(same_word_anc(1, tree, DocStats(doc)), 2);
}

TEST(HierarchyFeatures, PositionExamples) {
  const auto tree = HierarchyTree::from_parents(std::vector<NodeId>{kRootId, 0, 0, 0, 0, kRootId, 5});
  const auto second = pos_features(2, tree);
  EXPECT_EQ(second.pos, 2);
  EXPECT_EQ(second.pos_ratio, 0.5);
  const auto only = pos_features(6, tree);
  EXPECT_EQ(only.pos, 1);
  EXPECT_EQ(only.pos_ratio, 1.0);
}

TEST(HierarchyFeatures, CorruptedPathChangesAncestorFeatures) {
  // Unrelated passages keep the query term's IDF above the floor.
  const auto doc = text_document({"Liquidity risk", "Cash reserves and liquidity risk", "Outlook", "Revenue grew",
                                  "Credit", "Customers"});
  const DocStats stats(doc);
  const std::vector<NodeId> others(4, kRootId);
  std::vector<NodeId> gold_parents{kRootId, 0}, wrong_parents{kRootId, kRootId};
  gold_parents.insert(gold_parents.end(), others.begin(), others.end());
  wrong_parents.insert(wrong_parents.end(), others.begin(), others.end());
  const auto gold = HierarchyTree::from_parents(gold_parents);
  const auto wrong = HierarchyTree::from_parents(wrong_parents);
  const std::vector<std::string> q = {"liquidity"};
  EXPECT_GT(bm25_anc_max(q, 1, gold, stats), bm25_anc_max(q, 1, wrong, stats));
  EXPECT_GT(same_word_anc(1, gold, stats), same_word_anc(1, wrong, stats));
  EXPECT_EQ(bm25(q, 1, stats), bm25(q, 1, stats));
}

TEST(Metrics, HandScoredRankings) {
  std::vector<NodeId> order(10);
  std::iota(order.begin(), order.end(), 0);
  const std::vector<std::vector<NodeId>> rankings = {order, order, order};
  const std::vector<std::set<NodeId>> relevant = {{0, 2}, {4}, {1, 5, 9}};
  // AP: (1 + 2/3) / 2, 1/5, (1/2 + 2/6 + 3/10) / 3.
  EXPECT_NEAR(average_precision(order, relevant[0]), 0.8333333333333334, 1e-15);
  EXPECT_NEAR(average_precision(order, relevant[1]), 0.2, 1e-15);
  EXPECT_NEAR(average_precision(order, relevant[2]), 0.37777777777777777, 1e-15);
  const auto m = retrieval_metrics(rankings, relevant, {1, 3, 10});
  EXPECT_NEAR(m.map, 0.4703703703703704, 1e-15);
  EXPECT_NEAR(m.recall.at(1), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(m.recall.at(3), 4.0 / 9.0, 1e-15);
  EXPECT_NEAR(m.recall.at(10), 1.0, 1e-15);
  EXPECT_EQ(m.queries, 3u);
}

TEST(Metrics, RecallIsMonotoneAndApBounded) {
  Rng rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<NodeId> ranking(20);
    std::iota(ranking.begin(), ranking.end(), 0);
    rng.shuffle(ranking);
    std::set<NodeId> rel;
    for (int k = 0; k < rng.uniform_int(1, 5); ++k) rel.insert(rng.uniform_int(0, 19));
    double prev = 0.0;
    for (std::size_t k = 1; k <= 20; ++k) {
      const double r = recall_at(ranking, rel, k);
      EXPECT_GE(r, prev);
      prev = r;
    }
    const double ap = average_precision(ranking, rel);
    EXPECT_GE(ap, 0.0);
    EXPECT_LE(ap, 1.0);
  }
}

TEST(Ranker, Bm25OnlyWeightsSortByBm25) {
  const auto doc = text_document(kToyPassages);
  const DocStats stats(doc);
  const auto tree = HierarchyTree::from_parents(std::vector<NodeId>(kToyPassages.size(), kRootId));
  const LinearRanker ranker({1.0, 0, 0, 0, 0}, 0.0);
  const Query q{"q", "", kToyQueries[0]};
  const auto ranked = rank_passages(q, tree, stats, ranker);
  ASSERT_EQ(ranked.size(), kToyPassages.size());
  std::vector<NodeId> expected(kToyPassages.size());
  std::iota(expected.begin(), expected.end(), 0);
  std::stable_sort(expected.begin(), expected.end(),
                   [&](NodeId x, NodeId y) { return kToyBm25[0][static_cast<std::size_t>(x)] > kToyBm25[0][static_cast<std::size_t>(y)]; });
  for (std::size_t k = 0; k < ranked.size(); ++k) EXPECT_EQ(ranked[k].passage, expected[k]) << k;
}

TEST(Ranker, UntrainedIsModelError) {
  const auto doc = text_document({"a"});
  const auto tree = HierarchyTree::from_parents(std::vector<NodeId>{kRootId});
  try {
    rank_passages({"q", "", {"a"}}, tree, DocStats(doc), LinearRanker{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::model);
  }
}

TEST(Ranker, LeastSquaresRecoversLinearTargetAndRespectsMask) {
  Rng rng(53);
  std::vector<RankingExample> ex;
  for (int i = 0; i < 400; ++i) {
    PassageFeatures f;
    f.bm25 = rng.uniform(0, 3);
    f.bm25_anc_max = rng.uniform(0, 3);
    f.same_word_anc = rng.uniform_int(0, 4);
    f.pos = rng.uniform_int(1, 6);
    f.pos_ratio = rng.uniform(0.1, 1.0);
    ex.push_back({f, 0});
  }
  // 0/1 labels from a threshold still give positive weight to the driving features.
  for (auto& e : ex) e.relevant = e.features.bm25 + e.features.bm25_anc_max > 3.0;
  const auto full = train_linear_ranker(ex, {true, true, true, true, true});
  EXPECT_GT(full.weights()[0], 0.0);
  EXPECT_GT(full.weights()[1], 0.0);
  const auto bm25_only = train_linear_ranker(ex, {true, false, false, false, false});
  for (std::size_t j = 1; j < 5; ++j) EXPECT_EQ(bm25_only.weights()[j], 0.0);
  EXPECT_THROW(train_linear_ranker({}, {true, true, true, true, true}), Error);
}

}  // namespace
}  // namespace held
