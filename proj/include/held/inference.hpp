// Tree generation for new documents: objects are inserted in reading order,
// each at an insertion position chosen by querying a Scorer.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "held/document.hpp"
#include "held/patterns.hpp"
#include "held/scorer.hpp"
#include "held/tree.hpp"

namespace held {

enum class TraversalOrder { all, root_to_leaf, leaf_to_root };
enum class Mode { one_step, two_step };

inline const char* to_string(TraversalOrder o) {
  switch (o) {
    case TraversalOrder::all: return "all";
    case TraversalOrder::root_to_leaf: return "r2l";
    case TraversalOrder::leaf_to_root: return "l2r";
  }
  return "all";
}

inline std::optional<TraversalOrder> parse_order(std::string_view s) {
  if (s == "all") return TraversalOrder::all;
  if (s == "r2l") return TraversalOrder::root_to_leaf;
  if (s == "l2r") return TraversalOrder::leaf_to_root;
  return std::nullopt;
}

inline const char* to_string(Mode m) { return m == Mode::one_step ? "1step" : "2step"; }

inline std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "1step") return Mode::one_step;
  if (s == "2step") return Mode::two_step;
  return std::nullopt;
}

inline constexpr double kScoreEpsilon = 1e-9;

inline double clamped_log(double p) {
  return std::log(std::clamp(p, kScoreEpsilon, 1.0 - kScoreEpsilon));
}

struct Selection {
  std::size_t index = 0;  // into the positions span
  std::size_t inquiries = 0;
  double score = 0.0;
};

namespace detail {

inline double checked_score(double s) {
  if (!(s >= 0.0 && s <= 1.0))
    fail(ErrorCategory::model, "scorer returned " + std::to_string(s) + ", outside [0, 1]");
  return s;
}

}  // namespace detail

/// Picks a position by querying `score(position)` in the given traversal order.
///
///  - all: query every position, take the argmax; ties go to the deepest.
///  - root_to_leaf / leaf_to_root: scan in that direction and stop at the
///    first score above 0.5. If nothing clears 0.5 the scan was exhaustive and
///    the argmax of the scanned scores is returned (ties to the deepest).
template <class ScoreFn>
Selection select_position(std::span<const InsertionPosition> positions, ScoreFn&& score,
                          TraversalOrder order) {
  if (positions.empty()) fail(ErrorCategory::validation, "select_position: no positions");
  const std::size_t m = positions.size();
  std::vector<double> seen(m, -1.0);
  Selection sel;
  auto query = [&](std::size_t j) {
    ++sel.inquiries;
    seen[j] = detail::checked_score(score(positions[j]));
    return seen[j];
  };
  auto argmax_seen = [&] {
    std::size_t best = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (seen[j] >= seen[best]) best = j;
    return best;
  };
  switch (order) {
    case TraversalOrder::all:
      for (std::size_t j = 0; j < m; ++j) query(j);
      break;
    case TraversalOrder::root_to_leaf:
      for (std::size_t j = 0; j < m; ++j)
        if (query(j) > 0.5) {
          sel.index = j;
          sel.score = seen[j];
          return sel;
        }
      break;
    case TraversalOrder::leaf_to_root:
      for (std::size_t j = m; j-- > 0;)
        if (query(j) > 0.5) {
          sel.index = j;
          sel.score = seen[j];
          return sel;
        }
      break;
  }
  sel.index = argmax_seen();
  sel.score = seen[sel.index];
  return sel;
}

inline Selection select_position(std::span<const InsertionPosition> positions,
                                 const Scorer& scorer, const ContextBuilder& build,
                                 const HierarchyTree& tree, NodeId candidate,
                                 TraversalOrder order) {
  return select_position(
      positions, [&](const InsertionPosition& p) { return scorer.score(build(tree, p, candidate)); },
      order);
}

struct NodeChoice {
  NodeId node = 0;
  int depth = 0;  // depth of the chosen insertion position (its parent's depth)
  double score = 1.0;
  bool by_rule = false;  // attached by the two-step leaf rule, not by the scorer

  friend bool operator==(const NodeChoice&, const NodeChoice&) = default;
};

struct InferenceStats {
  std::size_t inquiries = 0;        // Scorer::score calls
  std::size_t generated_nodes = 0;  // objects placed by the scorer
  std::size_t headings = 0;         // heading objects (two-step only)
};

struct InferenceResult {
  HierarchyTree tree;
  InferenceStats stats;
  std::vector<NodeChoice> choices;
  double joint_log_prob = 0.0;  // sum of clamped log scores of the chosen positions
};

struct InferenceOptions {
  TraversalOrder order = TraversalOrder::root_to_leaf;
  Mode mode = Mode::one_step;
  int beam = 1;
  int window = kDefaultSiblingWindow;
  /// Used to precompute item-number matches; features fall back to on-the-fly
  /// matching when null.
  const PatternLibrary* patterns = nullptr;
};

namespace detail {

struct PreparedDocument {
  PatternMatches matches;
  ContextBuilder builder;

  PreparedDocument(const Document& doc, const InferenceOptions& opt)
      : matches(opt.patterns ? opt.patterns->match_all(doc) : PatternMatches{}),
        builder(doc, opt.patterns ? &matches : nullptr, opt.window) {}
  PreparedDocument(const PreparedDocument&) = delete;
};

}  // namespace detail

/// Greedy decoding (beam size 1) with the given traversal order.
inline InferenceResult infer_greedy(const Document& doc, const Scorer& scorer,
                                    const InferenceOptions& opt) {
  const detail::PreparedDocument prep(doc, opt);
  InferenceResult r;
  r.tree.reserve(doc.size());
  r.choices.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const NodeId id = static_cast<NodeId>(i);
    const auto positions = r.tree.insertion_positions();
    const Selection sel = select_position(positions, scorer, prep.builder, r.tree, id, opt.order);
    r.stats.inquiries += sel.inquiries;
    r.joint_log_prob += clamped_log(sel.score);
    r.choices.push_back({id, positions[sel.index].depth, sel.score, false});
    r.tree.insert(positions[sel.index], id);
  }
  r.stats.generated_nodes = doc.size();
  return r;
}

struct BeamCandidate {
  HierarchyTree tree;
  double joint_log_prob = 0.0;
  std::vector<NodeChoice> choices;
};

/// Beam search over insertion sequences. Each candidate is expanded with its
/// top-`bs` positions (all positions scored; ties prefer deeper positions), the
/// pool is cut back to `bs` by joint log-probability with a stable order, and
/// the best final candidate is returned. bs = 1 reproduces infer_greedy with
/// TraversalOrder::all.
inline InferenceResult infer_beam(const Document& doc, const Scorer& scorer, int bs,
                                  const InferenceOptions& opt) {
  if (bs < 1) fail(ErrorCategory::usage, "beam size must be >= 1");
  const detail::PreparedDocument prep(doc, opt);
  const auto width = static_cast<std::size_t>(bs);
  std::vector<BeamCandidate> beam(1);
  beam[0].tree.reserve(doc.size());
  InferenceStats stats;

  struct Expansion {
    std::size_t candidate;
    std::size_t position;
    double score;
    double joint;
  };
  std::vector<Expansion> pool;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const NodeId id = static_cast<NodeId>(i);
    pool.clear();
    std::vector<std::vector<InsertionPosition>> positions(beam.size());
    for (std::size_t c = 0; c < beam.size(); ++c) {
      positions[c] = beam[c].tree.insertion_positions();
      const auto& pos = positions[c];
      std::vector<double> scores(pos.size());
      for (std::size_t j = 0; j < pos.size(); ++j)
        scores[j] = detail::checked_score(scorer.score(prep.builder(beam[c].tree, pos[j], id)));
      stats.inquiries += pos.size();
      std::vector<std::size_t> rank(pos.size());
      std::iota(rank.rbegin(), rank.rend(), 0);  // deepest first, so stable ties favour depth
      std::stable_sort(rank.begin(), rank.end(),
                       [&](auto a, auto b) { return scores[a] > scores[b]; });
      rank.resize(std::min(width, rank.size()));
      for (auto j : rank)
        pool.push_back({c, j, scores[j], beam[c].joint_log_prob + clamped_log(scores[j])});
    }
    std::stable_sort(pool.begin(), pool.end(),
                     [](const Expansion& a, const Expansion& b) { return a.joint > b.joint; });
    pool.resize(std::min(width, pool.size()));
    std::vector<BeamCandidate> next;
    next.reserve(pool.size());
    for (const auto& e : pool) {
      BeamCandidate cand{beam[e.candidate].tree, e.joint, beam[e.candidate].choices};
      const auto& p = positions[e.candidate][e.position];
      cand.choices.push_back({id, p.depth, e.score, false});
      cand.tree.insert(p, id);
      next.push_back(std::move(cand));
    }
    beam = std::move(next);
  }
  InferenceResult r;
  r.tree = std::move(beam[0].tree);
  r.choices = std::move(beam[0].choices);
  r.joint_log_prob = beam[0].joint_log_prob;
  r.stats = stats;
  r.stats.generated_nodes = doc.size();
  return r;
}

/// Two-step extraction: a tree is generated over the heading objects only, then
/// every non-heading becomes the last child of the nearest preceding heading
/// (or of the root when no heading precedes it). `scorer` sees the heading
/// sub-document, whose objects are renumbered 0..H-1 in reading order.
inline InferenceResult build_two_step(const Document& doc, const std::vector<bool>& heading_flags,
                                      const Scorer& scorer, const InferenceOptions& opt) {
  if (heading_flags.size() != doc.size())
    fail(ErrorCategory::validation, "two-step: " + std::to_string(heading_flags.size()) +
                                        " heading flags for " + std::to_string(doc.size()) +
                                        " objects");
  const SubDocument sub = select_objects(doc, heading_flags);
  InferenceResult headings;
  if (!sub.doc.objects.empty())
    headings = opt.beam > 1 ? infer_beam(sub.doc, scorer, opt.beam, opt)
                            : infer_greedy(sub.doc, scorer, opt);

  InferenceResult r;
  r.tree.reserve(doc.size());
  r.stats.inquiries = headings.stats.inquiries;
  r.stats.generated_nodes = sub.doc.size();
  r.stats.headings = sub.doc.size();
  r.joint_log_prob = headings.joint_log_prob;
  std::vector<NodeId> full_id(sub.doc.size());
  NodeId last_heading = kRootId;
  std::size_t h = 0;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const NodeId id = static_cast<NodeId>(i);
    NodeChoice choice{id, 0, 1.0, true};
    NodeId parent = last_heading;
    if (heading_flags[i]) {
      const NodeId hp = headings.tree.parent(static_cast<NodeId>(h));
      parent = hp == kRootId ? kRootId : full_id[static_cast<std::size_t>(hp)];
      choice.score = headings.choices[h].score;
      choice.by_rule = false;
      full_id[h++] = id;
      last_heading = id;
    }
    const auto pos = r.tree.position_under(parent);
    if (!pos) fail(ErrorCategory::validation, "two-step: heading tree is not mergeable");
    choice.depth = pos->depth;
    r.choices.push_back(choice);
    r.tree.insert(*pos, id);
  }
  return r;
}

/// Dispatches on mode and beam size. Two-step needs heading flags.
inline InferenceResult infer(const Document& doc, const Scorer& scorer, const InferenceOptions& opt,
                             const std::vector<bool>* heading_flags = nullptr) {
  if (opt.mode == Mode::two_step) {
    if (!heading_flags) fail(ErrorCategory::usage, "two-step inference needs heading flags");
    return build_two_step(doc, *heading_flags, scorer, opt);
  }
  return opt.beam > 1 ? infer_beam(doc, scorer, opt.beam, opt) : infer_greedy(doc, scorer, opt);
}

}  // namespace held
