// Accuracy and efficiency measures for generated hierarchies.
//
// A node is correct when its whole path to the root equals the gold path; the
// legacy measure only compares depths and therefore forgives a node that sits
// at the right level under the wrong parent.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "held/document.hpp"
#include "held/inference.hpp"
#include "held/scorer.hpp"
#include "held/tree.hpp"

namespace held {

namespace detail {

inline void check_same_cover(const HierarchyTree& pred, const HierarchyTree& gold, NodeId id) {
  if (pred.size() != gold.size())
    fail(ErrorCategory::validation, "trees cover different node sets (" +
                                        std::to_string(pred.size()) + " vs " +
                                        std::to_string(gold.size()) + " nodes)");
  if (!gold.contains(id))
    fail(ErrorCategory::validation, "node " + std::to_string(id) + " not in tree");
}

}  // namespace detail

inline bool node_correct(const HierarchyTree& pred, const HierarchyTree& gold, NodeId id) {
  detail::check_same_cover(pred, gold, id);
  return pred.path_to_root(id) == gold.path_to_root(id);
}

inline bool legacy_depth_correct(const HierarchyTree& pred, const HierarchyTree& gold, NodeId id) {
  detail::check_same_cover(pred, gold, id);
  return pred.depth(id) == gold.depth(id);
}

struct LevelScore {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct DocumentScore {
  std::string doc_id;
  std::size_t n_nodes = 0;
  std::size_t correct = 0;
  std::size_t depth_correct = 0;
};

struct EvalReport {
  double node_accuracy = 0.0;
  double legacy_depth_accuracy = 0.0;
  std::size_t n_nodes = 0;
  std::map<int, LevelScore> per_level;  // level 1 = children of the root
  std::vector<DocumentScore> documents;
};

struct TreePair {
  std::string doc_id;
  const HierarchyTree* pred;
  const HierarchyTree* gold;
};

/// Micro-averaged over every node of every document. Per level k: a true
/// positive is a path-correct node with gold depth k; precision divides by the
/// nodes predicted at depth k and recall by the nodes at gold depth k.
inline EvalReport evaluate(const std::vector<TreePair>& pairs) {
  EvalReport rep;
  std::map<int, std::size_t> predicted_at, gold_at;
  std::size_t correct = 0, depth_correct = 0;
  for (const auto& p : pairs) {
    if (p.pred->size() != p.gold->size())
      fail(ErrorCategory::validation, "document '" + p.doc_id + "': predicted tree has " +
                                          std::to_string(p.pred->size()) + " nodes, gold has " +
                                          std::to_string(p.gold->size()));
    DocumentScore ds{p.doc_id, p.gold->size(), 0, 0};
    for (std::size_t i = 0; i < p.gold->size(); ++i) {
      const NodeId id = static_cast<NodeId>(i);
      const int gd = p.gold->depth(id), pd = p.pred->depth(id);
      const bool ok = node_correct(*p.pred, *p.gold, id);
      ++gold_at[gd];
      ++predicted_at[pd];
      if (ok) {
        ++ds.correct;
        ++rep.per_level[gd].tp;
      }
      ds.depth_correct += gd == pd;
    }
    correct += ds.correct;
    depth_correct += ds.depth_correct;
    rep.n_nodes += ds.n_nodes;
    rep.documents.push_back(std::move(ds));
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
  };
  for (const auto& [k, n] : gold_at) rep.per_level[k];
  for (const auto& [k, n] : predicted_at) rep.per_level[k];
  for (auto& [k, s] : rep.per_level) {
    s.fp = predicted_at[k] - s.tp;
    s.fn = gold_at[k] - s.tp;
    s.precision = ratio(s.tp, s.tp + s.fp);
    s.recall = ratio(s.tp, s.tp + s.fn);
    s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  }
  rep.node_accuracy = ratio(correct, rep.n_nodes);
  rep.legacy_depth_accuracy = ratio(depth_correct, rep.n_nodes);
  return rep;
}

/// Closed-form inquiry counts of an ideal scorer, computed from the gold tree,
/// with the structural quantities they are expressed in.
struct InquiryFormulas {
  long long all = 0;
  long long root_to_leaf = 0;
  long long leaf_to_root = 0;
  long long internal = 0;  // nodes with at least one child, root included
  long long leaves = 0;    // payload nodes without children
  long long branch = 0;    // payload nodes on the rightmost branch
};

/// Sums run over every node including the root, which has all payload nodes as
/// descendants, is on the rightmost branch, and has no next sibling.
///   all  = sum(desc(i) + [i off the rightmost branch])
///   r2l  = sum(desc(i) + [i has a next sibling])
///   l2r  = sum(internal_desc(i) + [i off the rightmost branch])
inline InquiryFormulas inquiry_formulas(const HierarchyTree& gold) {
  const std::size_t n = gold.size();
  // Slot 0 is the root; node i lives in slot i + 1.
  std::vector<long long> desc(n + 1, 0), internal_desc(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) {
    const NodeId p = gold.parent(static_cast<NodeId>(i));
    const auto ps = static_cast<std::size_t>(p + 1);
    desc[ps] += desc[i + 1] + 1;
    internal_desc[ps] += internal_desc[i + 1] + (gold.is_leaf(static_cast<NodeId>(i)) ? 0 : 1);
  }
  std::vector<bool> on_branch(n + 1, false);
  for (NodeId b : gold.rightmost_branch()) on_branch[static_cast<std::size_t>(b + 1)] = true;

  InquiryFormulas f;
  f.internal = gold.is_leaf(kRootId) ? 0 : 1;
  for (std::size_t s = 0; s <= n; ++s) {
    const bool off_branch = !on_branch[s];
    bool next_sibling = false;
    if (s > 0) {
      const NodeId id = static_cast<NodeId>(s - 1);
      next_sibling = gold.last_child(gold.parent(id)) != id;
      if (gold.is_leaf(id)) {
        ++f.leaves;
      } else {
        ++f.internal;
      }
    }
    f.all += desc[s] + off_branch;
    f.root_to_leaf += desc[s] + next_sibling;
    f.leaf_to_root += internal_desc[s] + off_branch;
  }
  f.branch = static_cast<long long>(gold.rightmost_branch().size()) - 1;
  return f;
}

/// Inquiries spent by greedy decoding with the oracle scorer of `gold`.
inline std::size_t empirical_inquiries(const Document& doc, const HierarchyTree& gold,
                                       TraversalOrder order, Mode mode = Mode::one_step) {
  InferenceOptions opt;
  opt.order = order;
  opt.mode = mode;
  if (mode == Mode::one_step) return infer_greedy(doc, OracleScorer(gold), opt).stats.inquiries;
  std::vector<bool> internal(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) internal[i] = !gold.is_leaf(static_cast<NodeId>(i));
  const OracleScorer oracle(restrict_tree(gold, internal));
  return build_two_step(doc, internal, oracle, opt).stats.inquiries;
}

/// Placeholder objects for replays that only exercise tree structure.
inline Document skeleton_document(std::string doc_id, std::size_t n) {
  Document doc{std::move(doc_id), {}};
  for (std::size_t i = 0; i < n; ++i)
    doc.objects.push_back({static_cast<NodeId>(i), ObjectKind::paragraph, "x", {}, std::nullopt});
  return doc;
}

struct TraversalStats {
  std::map<TraversalOrder, std::size_t> empirical;
  InquiryFormulas formulas;
};

inline TraversalStats traversal_stats(const Document& doc, const HierarchyTree& gold) {
  TraversalStats s;
  for (auto o : {TraversalOrder::all, TraversalOrder::root_to_leaf, TraversalOrder::leaf_to_root})
    s.empirical[o] = empirical_inquiries(doc, gold, o);
  s.formulas = inquiry_formulas(gold);
  return s;
}

}  // namespace held
