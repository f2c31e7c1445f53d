// Training tuples for the put-or-skip scorer, produced by replaying an
// annotated tree in reading order: every insertion event yields one tuple per
// insertion position, labelled 1 at the gold attachment.
#pragma once

#include <string>
#include <vector>

#include "held/features.hpp"
#include "held/scorer.hpp"
#include "held/tree.hpp"

namespace held {

struct LabeledTuple {
  std::string doc_id;
  int event_index = 0;  // reading-order index of the inserted object
  NodeId parent_id = kRootId;
  int position_depth = 0;
  int label = 0;
  FeatureVector features;
};

struct ReplayEvent {
  NodeId node = 0;
  int positions = 0;  // M_i
  bool corrupted = false;
  bool gold_available = true;  // gold parent was on the rightmost branch
};

struct TupleSet {
  std::vector<LabeledTuple> tuples;
  std::vector<ReplayEvent> events;
};

struct TupleOptions {
  const PatternLibrary* patterns = nullptr;
  int window = kDefaultSiblingWindow;
};

namespace detail {

inline void check_gold_covers(const Document& doc, const HierarchyTree& gold) {
  if (gold.size() != doc.size())
    fail(ErrorCategory::validation, "document '" + doc.doc_id + "': gold tree has " +
                                        std::to_string(gold.size()) + " nodes, document has " +
                                        std::to_string(doc.size()) + " objects");
}

inline TupleSet replay(const Document& doc, const HierarchyTree& gold, const TupleOptions& opt,
                       double error_rate, std::uint64_t seed) {
  check_gold_covers(doc, gold);
  if (!opt.patterns) fail(ErrorCategory::usage, "tuple generation needs a pattern library");
  if (!(error_rate >= 0.0 && error_rate <= 1.0))
    fail(ErrorCategory::usage, "error_rate must be in [0, 1]");

  const PatternMatches matches = opt.patterns->match_all(doc);
  const ContextBuilder build(doc, &matches, opt.window);
  const OracleScorer oracle(gold);
  Rng rng(seed);

  TupleSet out;
  HierarchyTree tree;
  tree.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const NodeId id = static_cast<NodeId>(i);
    const auto positions = tree.insertion_positions();
    const NodeId gold_parent = gold.parent(id);
    std::size_t target = positions.size();
    bool gold_available = false;
    for (std::size_t j = 0; j < positions.size(); ++j) {
      const ScoreContext ctx = build(tree, positions[j], id);
      const int label = positions[j].parent_id == gold_parent;
      gold_available |= label == 1;
      if (oracle.score(ctx) == 1.0) target = j;
      out.tuples.push_back({doc.doc_id, id, positions[j].parent_id, positions[j].depth, label,
                            extract_features(ctx, *opt.patterns)});
    }
    ReplayEvent ev{id, static_cast<int>(positions.size()), false, gold_available};
    // One draw per node keeps the random stream aligned across documents.
    const bool corrupt = error_rate > 0.0 && rng.bernoulli(error_rate);
    std::size_t chosen = target;
    if (corrupt && positions.size() > 1) {
      auto k = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(positions.size()) - 2));
      chosen = k >= target ? k + 1 : k;
      ev.corrupted = true;
    }
    tree.insert(positions[chosen], id);
    out.events.push_back(ev);
  }
  return out;
}

}  // namespace detail

/// Tuples under the assumption that every earlier object was placed correctly.
inline TupleSet generate_tuples(const Document& doc, const HierarchyTree& gold,
                                const TupleOptions& opt) {
  return detail::replay(doc, gold, opt, 0.0, 0);
}

/// Replays with random insertion errors: each node is, with probability
/// error_rate, placed uniformly at one of the positions other than the correct
/// one, and later tuples are read off the corrupted tree. Labels mark the gold
/// parent when it is still on the branch; otherwise every label of the event is 0.
inline TupleSet generate_error_tolerant_tuples(const Document& doc, const HierarchyTree& gold,
                                               const TupleOptions& opt, double error_rate,
                                               std::uint64_t seed) {
  return detail::replay(doc, gold, opt, error_rate, seed);
}

}  // namespace held
