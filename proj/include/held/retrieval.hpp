// Passage retrieval inside one document, using the document hierarchy.
//
// Besides Okapi BM25 of the passage itself, four features come from the tree:
// the best BM25 among the passage's ancestors, the number of words the passage
// shares with its ancestors, and its absolute and relative position among its
// siblings. A pointwise linear ranker combines them.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "held/document.hpp"
#include "held/patterns.hpp"
#include "held/tree.hpp"

namespace held {

/// Lower-cased ASCII alphanumeric runs; each CJK ideograph or kana is a token of
/// its own; other non-ASCII letters stay part of the surrounding word.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t start = i;
    const char32_t cp = detail::next_code_point(text, i);
    if (cp < 0x80) {
      const char c = static_cast<char>(cp);
      if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
        cur.push_back(c);
      } else if (c >= 'A' && c <= 'Z') {
        cur.push_back(static_cast<char>(c - 'A' + 'a'));
      } else {
        flush();
      }
      continue;
    }
    const bool cjk = (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
                     (cp >= 0xF900 && cp <= 0xFAFF) || (cp >= 0x3040 && cp <= 0x30FF);
    const bool separator = (cp >= 0x2000 && cp <= 0x206F) || (cp >= 0x3000 && cp <= 0x303F) ||
                           (cp >= 0xFF00 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
                           cp == 0xFFFD || (cp >= 0x2460 && cp <= 0x24FF) ||
                           (cp >= 0x25A0 && cp <= 0x25FF);
    if (cjk) {
      flush();
      out.emplace_back(text.substr(start, i - start));
    } else if (separator) {
      flush();
    } else {
      cur.append(text.substr(start, i - start));
    }
  }
  flush();
  return out;
}

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// Term statistics over all objects of one document.
class DocStats {
 public:
  explicit DocStats(const Document& doc, Bm25Params params = {}) : params_(params) {
    tokens_.reserve(doc.size());
    for (const auto& o : doc.objects) {
      tokens_.push_back(tokenize(o.text));
      std::map<std::string, int> tf;
      for (const auto& t : tokens_.back()) ++tf[t];
      for (const auto& [t, n] : tf) ++df_[t];
      total_len_ += tokens_.back().size();
      tf_.push_back(std::move(tf));
    }
    avgdl_ = doc.size() ? static_cast<double>(total_len_) / static_cast<double>(doc.size()) : 0.0;
  }

  std::size_t passages() const { return tokens_.size(); }
  double average_length() const { return avgdl_; }
  const std::vector<std::string>& tokens(NodeId id) const { return tokens_[static_cast<std::size_t>(id)]; }

  int term_frequency(NodeId id, const std::string& term) const {
    const auto& tf = tf_[static_cast<std::size_t>(id)];
    auto it = tf.find(term);
    return it == tf.end() ? 0 : it->second;
  }
  int document_frequency(const std::string& term) const {
    auto it = df_.find(term);
    return it == df_.end() ? 0 : it->second;
  }

  /// ln((N - n + 0.5) / (n + 0.5)), floored at 0.
  double idf(const std::string& term) const {
    const double n = document_frequency(term), total = static_cast<double>(passages());
    return std::max(0.0, std::log((total - n + 0.5) / (n + 0.5)));
  }

  const Bm25Params& params() const { return params_; }

 private:
  Bm25Params params_;
  std::vector<std::vector<std::string>> tokens_;
  std::vector<std::map<std::string, int>> tf_;
  std::unordered_map<std::string, int> df_;
  std::size_t total_len_ = 0;
  double avgdl_ = 0.0;
};

struct Query {
  std::string query_id;
  std::string doc_id;  // empty: applies to every document
  std::vector<std::string> terms;
};

/// Okapi BM25 summed over the distinct query terms.
inline double bm25(const std::vector<std::string>& query_terms, NodeId passage, const DocStats& stats) {
  const auto& toks = stats.tokens(passage);
  if (toks.empty() || stats.average_length() <= 0.0) return 0.0;
  const double dl = static_cast<double>(toks.size());
  const auto& p = stats.params();
  std::set<std::string> distinct(query_terms.begin(), query_terms.end());
  double score = 0.0;
  for (const auto& t : distinct) {
    const double tf = stats.term_frequency(passage, t);
    if (tf == 0) continue;
    score += stats.idf(t) * tf * (p.k1 + 1.0) /
             (tf + p.k1 * (1.0 - p.b + p.b * dl / stats.average_length()));
  }
  return score;
}

/// Largest BM25 among the passage's ancestors; the root contributes nothing.
inline double bm25_anc_max(const std::vector<std::string>& query_terms, NodeId passage,
                           const HierarchyTree& tree, const DocStats& stats) {
  double best = 0.0;
  for (NodeId a = tree.parent(passage); a != kRootId; a = tree.parent(a))
    best = std::max(best, bm25(query_terms, a, stats));
  return best;
}

/// |words(passage) ∩ (words of all ancestors merged)|.
inline int same_word_anc(NodeId passage, const HierarchyTree& tree, const DocStats& stats) {
  std::set<std::string> ancestors;
  for (NodeId a = tree.parent(passage); a != kRootId; a = tree.parent(a))
    ancestors.insert(stats.tokens(a).begin(), stats.tokens(a).end());
  std::set<std::string> own(stats.tokens(passage).begin(), stats.tokens(passage).end());
  int n = 0;
  for (const auto& w : own) n += ancestors.count(w) > 0;
  return n;
}

struct PositionFeatures {
  int pos = 1;             // 1-based index among the parent's children
  double pos_ratio = 1.0;  // pos / number of children of the parent
};

inline PositionFeatures pos_features(NodeId passage, const HierarchyTree& tree) {
  const auto siblings = tree.children(tree.parent(passage));
  const auto it = std::find(siblings.begin(), siblings.end(), passage);
  PositionFeatures f;
  f.pos = static_cast<int>(it - siblings.begin()) + 1;
  f.pos_ratio = static_cast<double>(f.pos) / static_cast<double>(siblings.size());
  return f;
}

struct PassageFeatures {
  double bm25 = 0.0;
  double bm25_anc_max = 0.0;
  int same_word_anc = 0;
  int pos = 1;
  double pos_ratio = 1.0;

  std::vector<double> values() const {
    return {bm25, bm25_anc_max, static_cast<double>(same_word_anc), static_cast<double>(pos), pos_ratio};
  }
};

inline const std::vector<std::string>& passage_feature_names() {
  static const std::vector<std::string> names = {"bm25", "bm25_anc_max", "same_word_anc", "pos",
                                                 "pos_ratio"};
  return names;
}

inline PassageFeatures passage_features(const std::vector<std::string>& query_terms, NodeId passage,
                                        const HierarchyTree& tree, const DocStats& stats) {
  PassageFeatures f;
  f.bm25 = bm25(query_terms, passage, stats);
  f.bm25_anc_max = bm25_anc_max(query_terms, passage, tree, stats);
  f.same_word_anc = same_word_anc(passage, tree, stats);
  const auto p = pos_features(passage, tree);
  f.pos = p.pos;
  f.pos_ratio = p.pos_ratio;
  return f;
}

/// Content passages are the leaves of the hierarchy.
inline std::vector<NodeId> content_passages(const HierarchyTree& tree) {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < tree.size(); ++i)
    if (tree.is_leaf(static_cast<NodeId>(i))) out.push_back(static_cast<NodeId>(i));
  return out;
}

/// Pointwise linear ranker. Features outside `mask` carry zero weight.
class LinearRanker {
 public:
  LinearRanker() = default;
  LinearRanker(std::vector<double> weights, double bias)
      : weights_(std::move(weights)), bias_(bias), trained_(true) {
    if (weights_.size() != passage_feature_names().size())
      fail(ErrorCategory::model, "ranker: expected " +
                                     std::to_string(passage_feature_names().size()) + " weights");
  }

  bool trained() const { return trained_; }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

  double score(const PassageFeatures& f) const {
    if (!trained_) fail(ErrorCategory::model, "ranker is not trained");
    const auto v = f.values();
    double s = bias_;
    for (std::size_t j = 0; j < v.size(); ++j) s += weights_[j] * v[j];
    return s;
  }

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
  bool trained_ = false;
};

struct RankingExample {
  PassageFeatures features;
  int relevant = 0;
};

/// Least squares on 0/1 relevance with a small ridge term, restricted to the
/// features whose mask entry is set.
inline LinearRanker train_linear_ranker(const std::vector<RankingExample>& examples,
                                        const std::vector<bool>& mask, double ridge = 1e-6) {
  if (examples.empty()) fail(ErrorCategory::model, "ranker: no training examples");
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < mask.size(); ++j)
    if (mask[j]) cols.push_back(j);
  const auto n = static_cast<Eigen::Index>(examples.size());
  const auto d = static_cast<Eigen::Index>(cols.size()) + 1;
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto v = examples[static_cast<std::size_t>(i)].features.values();
    for (std::size_t c = 0; c < cols.size(); ++c) x(i, static_cast<Eigen::Index>(c)) = v[cols[c]];
    x(i, d - 1) = 1.0;
    y(i) = examples[static_cast<std::size_t>(i)].relevant;
  }
  Eigen::MatrixXd gram = x.transpose() * x;
  for (Eigen::Index j = 0; j + 1 < d; ++j) gram(j, j) += ridge * static_cast<double>(n);
  const Eigen::VectorXd w = gram.ldlt().solve(x.transpose() * y);
  if (!w.allFinite()) fail(ErrorCategory::model, "ranker: least-squares solve failed");
  std::vector<double> weights(passage_feature_names().size(), 0.0);
  for (std::size_t c = 0; c < cols.size(); ++c) weights[cols[c]] = w(static_cast<Eigen::Index>(c));
  return LinearRanker(std::move(weights), w(d - 1));
}

struct RankedPassage {
  NodeId passage = 0;
  double score = 0.0;
};

/// Content passages by descending ranker score; ties broken by passage id.
inline std::vector<RankedPassage> rank_passages(const Query& q, const HierarchyTree& tree,
                                                const DocStats& stats, const LinearRanker& ranker) {
  std::vector<RankedPassage> out;
  for (NodeId p : content_passages(tree))
    out.push_back({p, ranker.score(passage_features(q.terms, p, tree, stats))});
  std::stable_sort(out.begin(), out.end(), [](const RankedPassage& a, const RankedPassage& b) {
    return a.score > b.score;
  });
  return out;
}

/// Average precision of one ranking against its relevant set; 0 when nothing is relevant.
inline double average_precision(const std::vector<NodeId>& ranking, const std::set<NodeId>& relevant) {
  if (relevant.empty()) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < ranking.size(); ++k)
    if (relevant.count(ranking[k])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  return sum / static_cast<double>(relevant.size());
}

inline double recall_at(const std::vector<NodeId>& ranking, const std::set<NodeId>& relevant,
                        std::size_t k) {
  if (relevant.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) hits += relevant.count(ranking[i]);
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

struct RetrievalMetrics {
  double map = 0.0;
  std::map<std::size_t, double> recall;  // k -> mean recall@k
  std::size_t queries = 0;
};

/// Means over queries that have at least one relevant passage.
inline RetrievalMetrics retrieval_metrics(const std::vector<std::vector<NodeId>>& rankings,
                                          const std::vector<std::set<NodeId>>& relevant,
                                          const std::vector<std::size_t>& ks = {1, 3, 5}) {
  RetrievalMetrics m;
  for (auto k : ks) m.recall[k] = 0.0;
  for (std::size_t q = 0; q < rankings.size(); ++q) {
    if (relevant[q].empty()) continue;
    ++m.queries;
    m.map += average_precision(rankings[q], relevant[q]);
    for (auto k : ks) m.recall[k] += recall_at(rankings[q], relevant[q], k);
  }
  if (m.queries) {
    m.map /= static_cast<double>(m.queries);
    for (auto& [k, r] : m.recall) r /= static_cast<double>(m.queries);
  }
  return m;
}

}  // namespace held
