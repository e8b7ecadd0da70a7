#include "slfs/tbn.hpp"

#include <algorithm>
#include <sstream>

#include "slfs/errors.hpp"

namespace slfs {

namespace {

std::string node_str(std::int32_t n) {
  return n == Tbn::kClassNode ? std::string("Y") : "f" + std::to_string(n);
}

}  // namespace

Tbn::Tbn(std::int32_t max_depth, std::int32_t nch) : max_depth_(max_depth), nch_(nch) {
  if (max_depth < 1) throw TbnError("max_depth must be >= 1");
  if (nch < 1) throw TbnError("nch must be >= 1");
  children_.emplace(kClassNode, std::vector<std::int32_t>{});
  depth_.emplace(kClassNode, 0);
}

void Tbn::add_edge(std::int32_t parent, std::int32_t child) {
  if (child < 0) throw TbnError("invalid feature id " + std::to_string(child));
  if (contains(child)) throw TbnError("node " + node_str(child) + " already present");
  if (parent != kClassNode && !contains(parent))
    throw TbnError("unknown parent " + node_str(parent));

  const std::int32_t d = depth_.at(parent) + 1;
  if (d > max_depth_)
    throw TbnError("adding " + node_str(child) + " under " + node_str(parent) +
                   " exceeds depth cap " + std::to_string(max_depth_));
  if (at_child_capacity(parent))
    throw TbnError("child list of " + node_str(parent) + " is full (cap " +
                   std::to_string(nch_) + ")");

  parent_.emplace(child, parent);
  children_[parent].push_back(child);
  children_.emplace(child, std::vector<std::int32_t>{});
  depth_.emplace(child, d);
}

void Tbn::swap(std::int32_t incoming, std::int32_t displaced) {
  if (!contains(incoming) || !contains(displaced))
    throw TbnError("swap on nodes not in the tree");
  if (parent_.at(incoming) != displaced)
    throw TbnError("swap requires " + node_str(displaced) + " to be the parent of " +
                   node_str(incoming));
  if (!children_.at(incoming).empty())
    throw TbnError("swap requires " + node_str(incoming) + " to be childless");

  const std::int32_t grandparent = parent_.at(displaced);

  // incoming takes displaced's slot under the grandparent.
  auto& gp_children = children_.at(grandparent);
  *std::find(gp_children.begin(), gp_children.end(), displaced) = incoming;
  parent_.at(incoming) = grandparent;

  // displaced's former children (incoming excluded) follow displaced under
  // incoming, displaced first, original order after it.
  std::vector<std::int32_t> moved;
  moved.push_back(displaced);
  for (auto c : children_.at(displaced))
    if (c != incoming) moved.push_back(c);
  children_.at(displaced).clear();
  children_.at(incoming) = moved;
  for (auto c : moved) parent_.at(c) = incoming;

  if (static_cast<std::int32_t>(moved.size()) > nch_ && !cap_relaxed_.count(incoming)) {
    cap_relaxed_.insert(incoming);
    warnings_.push_back("child cap " + std::to_string(nch_) + " relaxed for " +
                        node_str(incoming) + " after swap with " + node_str(displaced));
  }

  recompute_depths_under(incoming);
}

void Tbn::remove_leaf(std::int32_t f) {
  if (!contains(f)) throw TbnError("remove of unknown node " + node_str(f));
  if (!children_.at(f).empty())
    throw TbnError("remove of non-leaf " + node_str(f));
  auto& sib = children_.at(parent_.at(f));
  sib.erase(std::find(sib.begin(), sib.end(), f));
  parent_.erase(f);
  children_.erase(f);
  depth_.erase(f);
  cap_relaxed_.erase(f);
}

std::int32_t Tbn::parent_of(std::int32_t f) const {
  auto it = parent_.find(f);
  if (it == parent_.end()) throw TbnError("parent_of: unknown node " + node_str(f));
  return it->second;
}

const std::vector<std::int32_t>& Tbn::children_of(std::int32_t node) const {
  auto it = children_.find(node);
  if (it == children_.end()) return empty_children_;
  return it->second;
}

std::int32_t Tbn::depth_of(std::int32_t node) const {
  auto it = depth_.find(node);
  if (it == depth_.end()) throw TbnError("depth_of: unknown node " + node_str(node));
  return it->second;
}

bool Tbn::at_child_capacity(std::int32_t node) const {
  if (cap_relaxed_.count(node)) return false;
  auto it = children_.find(node);
  return it != children_.end() &&
         static_cast<std::int32_t>(it->second.size()) >= nch_;
}

std::vector<std::int32_t> Tbn::nodes() const {
  std::vector<std::int32_t> out;
  out.reserve(parent_.size());
  for (const auto& [f, _] : parent_) out.push_back(f);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::int32_t> Tbn::ancestors_of(std::int32_t f) const {
  std::vector<std::int32_t> out;
  std::int32_t cur = parent_of(f);
  while (cur != kClassNode) {
    out.push_back(cur);
    cur = parent_of(cur);
  }
  return out;
}

void Tbn::validate() const {
  if (depth_.at(kClassNode) != 0) throw TbnError("invariant: class node depth must be 0");

  for (const auto& [f, p] : parent_) {
    if (p != kClassNode && !parent_.count(p))
      throw TbnError("invariant: parent of " + node_str(f) + " missing");
    if (depth_.at(f) != depth_.at(p) + 1)
      throw TbnError("invariant: depth bookkeeping broken at " + node_str(f));
    if (depth_.at(f) > max_depth_)
      throw TbnError("invariant: depth cap exceeded at " + node_str(f));
    const auto& sib = children_.at(p);
    if (std::count(sib.begin(), sib.end(), f) != 1)
      throw TbnError("invariant: child-list mismatch at " + node_str(f));

    // Acyclicity plus reachability: walking parents must reach Y without
    // revisiting and within size() steps.
    std::int32_t cur = f;
    std::size_t steps = 0;
    while (cur != kClassNode) {
      cur = parent_.at(cur);
      if (++steps > parent_.size()) throw TbnError("invariant: cycle at " + node_str(f));
    }
  }

  std::size_t listed = 0;
  for (const auto& [node, kids] : children_) {
    listed += kids.size();
    if (!cap_relaxed_.count(node) && static_cast<std::int32_t>(kids.size()) > nch_)
      throw TbnError("invariant: child cap exceeded at " + node_str(node));
    for (auto c : kids)
      if (parent_.at(c) != node)
        throw TbnError("invariant: parent/child disagreement at " + node_str(c));
  }
  if (listed != parent_.size())
    throw TbnError("invariant: children lists do not partition the node set");
}

std::string Tbn::to_dot(std::span<const std::string> names,
                        const std::string& class_label) const {
  auto label_of = [&](std::int32_t f) -> std::string {
    if (f >= 0 && static_cast<std::size_t>(f) < names.size()) return names[f];
    return "f" + std::to_string(f);
  };

  std::ostringstream os;
  os << "digraph tbn {\n";
  os << "  rankdir=TB;\n";
  os << "  class [label=\"" << class_label << "\", shape=doublecircle];\n";
  for (auto f : nodes())
    os << "  n" << f << " [label=\"" << label_of(f) << "\", shape=ellipse];\n";
  for (auto f : nodes()) {
    const std::int32_t p = parent_.at(f);
    if (p == kClassNode)
      os << "  class -> n" << f << ";\n";
    else
      os << "  n" << p << " -> n" << f << ";\n";
  }
  os << "}\n";
  return os.str();
}

void Tbn::recompute_depths_under(std::int32_t node) {
  const std::int32_t base = depth_.at(parent_.at(node));
  std::vector<std::pair<std::int32_t, std::int32_t>> stack{{node, base + 1}};
  while (!stack.empty()) {
    auto [cur, d] = stack.back();
    stack.pop_back();
    depth_.at(cur) = d;
    for (auto c : children_.at(cur)) stack.emplace_back(c, d + 1);
  }
}

}  // namespace slfs
