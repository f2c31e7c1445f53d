// Shared fixtures and generators for the test suites.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "held/held.hpp"

namespace held::test {

/// Parent array of a random reading-order tree: node i picks a uniformly random
/// rightmost-branch node as its parent. `deepen` biases towards deeper positions.
inline std::vector<NodeId> random_parents(std::size_t n, Rng& rng, double deepen = 0.0) {
  HierarchyTree t;
  std::vector<NodeId> parents;
  for (std::size_t i = 0; i < n; ++i) {
    const auto pos = t.insertion_positions();
    std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pos.size()) - 1));
    if (rng.bernoulli(deepen)) j = pos.size() - 1;
    t.insert(pos[j], static_cast<NodeId>(i));
    parents.push_back(pos[j].parent_id);
  }
  return parents;
}

inline HierarchyTree random_tree(std::size_t n, Rng& rng, double deepen = 0.0) {
  return HierarchyTree::from_parents(random_parents(n, rng, deepen));
}

/// Every reading-order tree with exactly n nodes, as parent arrays.
inline void for_each_tree(std::size_t n, const std::function<void(const HierarchyTree&)>& fn) {
  std::function<void(const HierarchyTree&)> grow = [&](const HierarchyTree& t) {
    if (t.size() == n) {
      fn(t);
      return;
    }
    for (const auto& p : t.insertion_positions()) grow(insert_at(t, p, static_cast<NodeId>(t.size())));
  };
  grow(HierarchyTree{});
}

inline PhysicalObject paragraph(NodeId id, std::string text, FormatAttrs f = {}) {
  return {id, ObjectKind::paragraph, std::move(text), f, std::nullopt};
}

inline FormatAttrs heading_format(double size, bool bold = true) {
  FormatAttrs f;
  f.font_size = size;
  f.bold = bold;
  f.font_family_id = 2;
  return f;
}

/// Document whose objects carry the given texts with body formatting.
inline Document text_document(const std::vector<std::string>& texts, std::string doc_id = "doc") {
  Document d{std::move(doc_id), {}};
  for (std::size_t i = 0; i < texts.size(); ++i) d.objects.push_back(paragraph(static_cast<NodeId>(i), texts[i]));
  return d;
}

// Worked example: objects a..f with a under the root, b and c under a, and
// d, e, f under c. Its rightmost branch is root, a, c, f.
enum : NodeId { a = 0, b, c, d, e, f, g, h };
inline const std::vector<NodeId> kExampleParents = {kRootId, a, a, c, c, c};

inline HierarchyTree example_tree() { return HierarchyTree::from_parents(kExampleParents); }

/// Gold and predicted trees over a..g that differ only in where f and g hang:
/// gold g -> c -> a, predicted g -> f -> a. Both put g at depth 3.
inline HierarchyTree path_example_gold() { return HierarchyTree::from_parents(std::vector<NodeId>{kRootId, a, a, c, c, c, c}); }
inline HierarchyTree path_example_pred() { return HierarchyTree::from_parents(std::vector<NodeId>{kRootId, a, a, c, c, a, f}); }

/// A short report with numbered headings and body paragraphs in between.
/// Heading g sits beside body paragraph f under heading e.
struct SmallReport {
  Document doc;
  HierarchyTree gold;
  std::vector<bool> headings;
};

inline SmallReport small_report() {
  const FormatAttrs h1 = heading_format(16), h2 = heading_format(13);
  SmallReport r;
  r.doc = {"report", {paragraph(0, "1. Overview", h1),
                      paragraph(1, "The company was founded in 1998 and is listed."),
                      paragraph(2, "1.1 History", h2),
                      paragraph(3, "It grew through several acquisitions."),
                      paragraph(4, "2. Risk factors", h1),
                      paragraph(5, "Investors should read this section carefully."),
                      paragraph(6, "2.1 Liquidity", h2),
                      paragraph(7, "Cash reserves cover twelve months of operations.")}};
  r.gold = HierarchyTree::from_parents(std::vector<NodeId>{kRootId, 0, 0, 2, kRootId, 4, 4, 6});
  r.headings = {true, false, true, false, true, false, true, false};
  return r;
}

inline std::vector<bool> internal_flags(const HierarchyTree& t) {
  std::vector<bool> flags(t.size());
  for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = !t.is_leaf(static_cast<NodeId>(i));
  return flags;
}

/// Moves g from its gold parent to its previous sibling f, with f raised one
/// level so that g keeps its depth. Returns false when the tree has no node
/// pair with the needed shape.
inline bool sibling_swap(const std::vector<NodeId>& gold, std::vector<NodeId>& pred) {
  const std::size_t n = gold.size();
  for (std::size_t gi = n; gi-- > 1;) {
    const std::size_t fi = gi - 1;
    const NodeId cp = gold[gi];
    if (gold[fi] != cp || cp == kRootId) continue;
    bool leaves = true, last = true;
    for (std::size_t k = 0; k < n; ++k) {
      leaves &= gold[k] != static_cast<NodeId>(fi) && gold[k] != static_cast<NodeId>(gi);
      if (k > gi) last &= gold[k] != cp;
    }
    if (!leaves || !last) continue;
    pred = gold;
    pred[fi] = gold[static_cast<std::size_t>(cp)];
    pred[gi] = static_cast<NodeId>(fi);
    return true;
  }
  return false;
}

/// Deterministic pseudo-random scorer: a hash of (candidate, parent, depth).
inline LambdaScorer hashed_scorer(std::uint64_t seed) {
  return LambdaScorer([seed](const ScoreContext& ctx) {
    const std::uint64_t h = mix_seed(seed ^ mix_seed(static_cast<std::uint64_t>(ctx.candidate_id()) * 1000003ULL +
                                                     static_cast<std::uint64_t>(ctx.parent_id() + 1) * 7919ULL +
                                                     static_cast<std::uint64_t>(ctx.position_depth)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  });
}

}  // namespace held::test
