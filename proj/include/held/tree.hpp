// Logical hierarchy trees built by appending nodes in reading order.
//
// A tree grows only along its rightmost branch: the path from the virtual root
// following last children. A new node may become the last child of any node on
// that branch and nowhere else; these are exactly the attachments that keep the
// pre-order traversal equal to the reading order. HierarchyTree enforces this,
// so every value of the type satisfies the invariant.
#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "held/core.hpp"

namespace held {

/// Node ids from a node up to and including the root sentinel.
using NodePath = std::vector<NodeId>;

/// "Become the last child of parent_id". The child count pins the position to
/// one tree state so that a position kept past an insertion is detectably stale.
struct InsertionPosition {
  NodeId parent_id = kRootId;
  int depth = 0;  // index on the rightmost branch, root = 0
  int parent_child_count = 0;

  friend bool operator==(const InsertionPosition&, const InsertionPosition&) = default;
};

class HierarchyTree {
 public:
  static constexpr NodeId kNoNode = -2;

  HierarchyTree() : branch_{kRootId}, last_child_{kNoNode}, child_count_{0} {}

  /// Replays parents[i] in order; rejects arrays that are not reading-order trees.
  static HierarchyTree from_parents(std::span<const NodeId> parents) {
    HierarchyTree tree;
    tree.reserve(parents.size());
    for (std::size_t i = 0; i < parents.size(); ++i) {
      auto pos = tree.position_under(parents[i]);
      if (!pos)
        fail(ErrorCategory::validation,
             "node " + std::to_string(i) + ": parent " + std::to_string(parents[i]) +
                 " is not on the rightmost branch (pre-order would not match reading order)");
      tree.insert(*pos, static_cast<NodeId>(i));
    }
    return tree;
  }

  void reserve(std::size_t n) {
    parent_.reserve(n);
    prev_sibling_.reserve(n);
    depth_.reserve(n);
    last_child_.reserve(n + 1);
    child_count_.reserve(n + 1);
  }

  std::size_t size() const { return parent_.size(); }
  bool empty() const { return parent_.empty(); }
  bool contains(NodeId id) const { return id >= 0 && static_cast<std::size_t>(id) < size(); }

  NodeId parent(NodeId id) const { return parent_[checked(id)]; }
  /// Root is depth 0; children of the root are depth 1.
  int depth(NodeId id) const { return id == kRootId ? 0 : depth_[checked(id)]; }
  int child_count(NodeId id) const { return child_count_[slot(id)]; }
  NodeId last_child(NodeId id) const { return last_child_[slot(id)]; }
  NodeId previous_sibling(NodeId id) const { return prev_sibling_[checked(id)]; }
  bool is_leaf(NodeId id) const { return child_count(id) == 0; }
  const std::vector<NodeId>& parents() const { return parent_; }

  /// Root first; each next node is the last child of the previous one.
  std::span<const NodeId> rightmost_branch() const { return branch_; }

  std::vector<InsertionPosition> insertion_positions() const {
    std::vector<InsertionPosition> out;
    out.reserve(branch_.size());
    for (std::size_t d = 0; d < branch_.size(); ++d)
      out.push_back({branch_[d], static_cast<int>(d), child_count(branch_[d])});
    return out;
  }

  std::optional<InsertionPosition> position_under(NodeId parent_id) const {
    if (parent_id != kRootId && !contains(parent_id)) return std::nullopt;
    const int d = depth(parent_id);
    if (static_cast<std::size_t>(d) >= branch_.size() || branch_[d] != parent_id)
      return std::nullopt;
    return InsertionPosition{parent_id, d, child_count(parent_id)};
  }

  bool is_current(const InsertionPosition& pos) const {
    return pos.depth >= 0 && static_cast<std::size_t>(pos.depth) < branch_.size() &&
           branch_[pos.depth] == pos.parent_id &&
           child_count(pos.parent_id) == pos.parent_child_count;
  }

  /// Appends node `obj_id` (which must equal size()) as the last child of pos.parent_id.
  void insert(const InsertionPosition& pos, NodeId obj_id) {
    if (obj_id != static_cast<NodeId>(size()))
      fail(ErrorCategory::validation, "insert: node id " + std::to_string(obj_id) +
                                          " is not the next reading-order id " +
                                          std::to_string(size()));
    if (!is_current(pos))
      fail(ErrorCategory::validation,
           "insert: stale insertion position (parent " + std::to_string(pos.parent_id) +
               " at depth " + std::to_string(pos.depth) + ")");
    const NodeId p = pos.parent_id;
    parent_.push_back(p);
    prev_sibling_.push_back(last_child_[slot(p)]);
    depth_.push_back(pos.depth + 1);
    last_child_[slot(p)] = obj_id;
    ++child_count_[slot(p)];
    last_child_.push_back(kNoNode);
    child_count_.push_back(0);
    branch_.resize(static_cast<std::size_t>(pos.depth) + 1);
    branch_.push_back(obj_id);
  }

  /// Children of `id` in document order.
  std::vector<NodeId> children(NodeId id) const {
    std::vector<NodeId> out(static_cast<std::size_t>(child_count(id)));
    NodeId c = last_child(id);
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      *it = c;
      c = prev_sibling_[static_cast<std::size_t>(c)];
    }
    return out;
  }

  /// The last `k` children of `id`, oldest first.
  std::vector<NodeId> last_children(NodeId id, int k) const {
    std::vector<NodeId> out;
    for (NodeId c = last_child(id); c != kNoNode && static_cast<int>(out.size()) < k;
         c = prev_sibling_[static_cast<std::size_t>(c)])
      out.push_back(c);
    return {out.rbegin(), out.rend()};
  }

  std::vector<NodeId> preorder() const;

  NodePath path_to_root(NodeId id) const {
    if (!contains(id))
      fail(ErrorCategory::validation, "path_to_root: unknown node id " + std::to_string(id));
    NodePath path;
    path.reserve(static_cast<std::size_t>(depth_[static_cast<std::size_t>(id)]) + 1);
    for (NodeId n = id; n != kRootId; n = parent_[static_cast<std::size_t>(n)]) path.push_back(n);
    path.push_back(kRootId);
    return path;
  }

  int max_depth() const {
    int d = 0;
    for (int x : depth_) d = std::max(d, x);
    return d;
  }

  friend bool operator==(const HierarchyTree& a, const HierarchyTree& b) {
    return a.parent_ == b.parent_;
  }

 private:
  std::size_t checked(NodeId id) const {
    if (!contains(id))
      fail(ErrorCategory::validation, "unknown node id " + std::to_string(id));
    return static_cast<std::size_t>(id);
  }
  std::size_t slot(NodeId id) const {
    return id == kRootId ? 0 : checked(id) + 1;
  }

  std::vector<NodeId> parent_;
  std::vector<NodeId> prev_sibling_;
  std::vector<int> depth_;
  std::vector<NodeId> branch_;
  // Indexed by slot(): the root occupies slot 0.
  std::vector<NodeId> last_child_;
  std::vector<int> child_count_;
};

/// Pre-order over an arbitrary parent array, children ordered by id. Nodes not
/// reachable from the root are omitted.
inline std::vector<NodeId> preorder_of_parents(std::span<const NodeId> parents) {
  const auto n = parents.size();
  std::vector<std::vector<NodeId>> kids(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId p = parents[i];
    if (p < kRootId || p >= static_cast<NodeId>(n) || p == static_cast<NodeId>(i)) continue;
    kids[static_cast<std::size_t>(p + 1)].push_back(static_cast<NodeId>(i));
  }
  std::vector<NodeId> order;
  order.reserve(n);
  std::vector<bool> seen(n, false);
  std::vector<NodeId> stack(kids[0].rbegin(), kids[0].rend());
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (seen[static_cast<std::size_t>(v)]) continue;
    seen[static_cast<std::size_t>(v)] = true;
    order.push_back(v);
    const auto& ch = kids[static_cast<std::size_t>(v + 1)];
    stack.insert(stack.end(), ch.rbegin(), ch.rend());
  }
  return order;
}

inline std::vector<NodeId> HierarchyTree::preorder() const { return preorder_of_parents(parent_); }

/// Value-returning insertion; the argument tree is left untouched.
inline HierarchyTree insert_at(const HierarchyTree& tree, const InsertionPosition& pos,
                               NodeId obj_id) {
  HierarchyTree next = tree;
  next.insert(pos, obj_id);
  return next;
}

/// Projects `tree` onto the nodes with keep[i] set. Each kept node hangs under
/// its nearest kept ancestor; ids are renumbered 0..k-1 in reading order.
inline HierarchyTree restrict_tree(const HierarchyTree& tree, const std::vector<bool>& keep) {
  std::vector<NodeId> new_id(tree.size(), kRootId);
  std::vector<NodeId> parents;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (!keep[i]) continue;
    NodeId a = tree.parent(static_cast<NodeId>(i));
    while (a != kRootId && !keep[static_cast<std::size_t>(a)]) a = tree.parent(a);
    new_id[i] = static_cast<NodeId>(parents.size());
    parents.push_back(a == kRootId ? kRootId : new_id[static_cast<std::size_t>(a)]);
  }
  return HierarchyTree::from_parents(parents);
}

}  // namespace held
