// The put-or-skip contract: a Scorer estimates the probability that the
// candidate object belongs at one insertion position, given the local context
// of that position (its parent and the parent's most recent children).
#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <vector>

#include "held/document.hpp"
#include "held/patterns.hpp"
#include "held/tree.hpp"

namespace held {

inline constexpr int kDefaultSiblingWindow = 3;

struct ScoreContext {
  const PhysicalObject* candidate = nullptr;
  const PhysicalObject* parent = nullptr;       // nullptr for the virtual root
  std::vector<const PhysicalObject*> siblings;  // up to K last children, oldest first
  int position_depth = 0;
  std::span<const NodeId> branch;               // rightmost branch, root first
  const PatternMatches* patterns = nullptr;     // precomputed matches indexed by object id

  NodeId candidate_id() const { return candidate->id; }
  NodeId parent_id() const { return parent ? parent->id : kRootId; }
  bool parent_is_root() const { return parent == nullptr; }
};

class ContextBuilder {
 public:
  ContextBuilder(const Document& doc, const PatternMatches* patterns,
                 int window = kDefaultSiblingWindow)
      : doc_(&doc), patterns_(patterns), window_(window) {}

  ScoreContext operator()(const HierarchyTree& tree, const InsertionPosition& pos,
                          NodeId candidate) const {
    ScoreContext ctx;
    ctx.candidate = &(*doc_)[candidate];
    ctx.parent = pos.parent_id == kRootId ? nullptr : &(*doc_)[pos.parent_id];
    for (NodeId s : tree.last_children(pos.parent_id, window_)) ctx.siblings.push_back(&(*doc_)[s]);
    ctx.position_depth = pos.depth;
    ctx.branch = tree.rightmost_branch();
    ctx.patterns = patterns_;
    return ctx;
  }

  const Document& document() const { return *doc_; }
  int window() const { return window_; }

 private:
  const Document* doc_;
  const PatternMatches* patterns_;
  int window_;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  /// Probability in [0, 1]; deterministic for a given context.
  virtual double score(const ScoreContext& ctx) const = 0;
};

/// Adapts any callable; handy for tests and for hand-written rules.
class LambdaScorer final : public Scorer {
 public:
  explicit LambdaScorer(std::function<double(const ScoreContext&)> fn) : fn_(std::move(fn)) {}
  double score(const ScoreContext& ctx) const override { return fn_(ctx); }

 private:
  std::function<double(const ScoreContext&)> fn_;
};

/// Scores 1 exactly at the gold attachment, 0 elsewhere. When earlier mistakes
/// have removed the gold parent from the rightmost branch, the target becomes
/// the deepest branch node that is still a gold ancestor of the candidate.
class OracleScorer final : public Scorer {
 public:
  explicit OracleScorer(HierarchyTree gold) : gold_(std::move(gold)) {}

  NodeId target(const ScoreContext& ctx) const {
    const NodeId c = ctx.candidate_id();
    const NodeId gold_parent = gold_.parent(c);
    if (std::find(ctx.branch.begin(), ctx.branch.end(), gold_parent) != ctx.branch.end())
      return gold_parent;
    const NodePath ancestors = gold_.path_to_root(c);
    for (auto it = ctx.branch.rbegin(); it != ctx.branch.rend(); ++it)
      if (std::find(ancestors.begin() + 1, ancestors.end(), *it) != ancestors.end()) return *it;
    return kRootId;
  }

  double score(const ScoreContext& ctx) const override {
    return ctx.parent_id() == target(ctx) ? 1.0 : 0.0;
  }

  const HierarchyTree& gold() const { return gold_; }

 private:
  HierarchyTree gold_;
};

inline OracleScorer oracle_scorer(const HierarchyTree& gold) { return OracleScorer(gold); }

}  // namespace held
