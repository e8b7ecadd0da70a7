#ifndef SLFS_TBN_HPP
#define SLFS_TBN_HPP

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace slfs {

/// Class-rooted tree over feature nodes: the single source of truth for
/// structure while features are inserted. The class node is the root at
/// depth 0; every feature node has one parent (the class or a feature),
/// an insertion-ordered child list, and depth = parent depth + 1.
///
/// Caps: no node may exceed `nch` children and no node may sit deeper than
/// `max_depth`. add_edge enforces both. swap() transfers the displaced
/// node's children to the incoming node; should that ever overflow the child
/// cap, the cap is relaxed for that node and a warning is recorded rather
/// than failing mid-restructure.
class Tbn {
 public:
  static constexpr std::int32_t kClassNode = -1;

  Tbn(std::int32_t max_depth, std::int32_t nch);

  /// Attach `child` (not yet in the tree) under `parent` (class node or an
  /// existing feature). Throws TbnError on duplicate child, unknown parent,
  /// full child list, or depth overflow.
  void add_edge(std::int32_t parent, std::int32_t child);

  /// `incoming` must be a childless child of `displaced`. Afterwards
  /// `incoming` holds `displaced`'s old position, and `displaced` plus its
  /// former children hang under `incoming`.
  void swap(std::int32_t incoming, std::int32_t displaced);

  /// Remove a leaf feature. Throws TbnError when `f` has children.
  void remove_leaf(std::int32_t f);

  bool contains(std::int32_t f) const { return parent_.count(f) != 0; }
  std::size_t size() const { return parent_.size(); }
  bool empty() const { return parent_.empty(); }

  std::int32_t parent_of(std::int32_t f) const;
  const std::vector<std::int32_t>& children_of(std::int32_t node) const;
  std::int32_t depth_of(std::int32_t node) const;  // class node -> 0
  bool at_child_capacity(std::int32_t node) const;

  std::int32_t max_depth_cap() const { return max_depth_; }
  std::int32_t child_cap() const { return nch_; }

  /// Feature ids present, ascending.
  std::vector<std::int32_t> nodes() const;
  /// Feature ancestors of `f`, nearest first; the class node is not listed.
  std::vector<std::int32_t> ancestors_of(std::int32_t f) const;

  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Checks every structural invariant (single root, acyclicity, depth
  /// bookkeeping, reachability, caps); throws TbnError on the first failure.
  void validate() const;

  /// Canonical DOT rendering: nodes sorted by id, class node styled
  /// distinctly, one edge per parent link. `names` maps feature id to label
  /// when provided, otherwise ids render as f<id>.
  std::string to_dot(std::span<const std::string> names = {},
                     const std::string& class_label = "Y") const;

 private:
  std::unordered_map<std::int32_t, std::int32_t> parent_;
  std::unordered_map<std::int32_t, std::vector<std::int32_t>> children_;
  std::unordered_map<std::int32_t, std::int32_t> depth_;
  std::unordered_set<std::int32_t> cap_relaxed_;
  std::vector<std::string> warnings_;
  std::int32_t max_depth_;
  std::int32_t nch_;
  std::vector<std::int32_t> empty_children_;

  void recompute_depths_under(std::int32_t node);
};

}  // namespace slfs

#endif  // SLFS_TBN_HPP
