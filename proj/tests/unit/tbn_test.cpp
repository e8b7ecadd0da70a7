#include <doctest.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "slfs/errors.hpp"
#include "slfs/rng.hpp"
#include "slfs/tbn.hpp"

using namespace slfs;
using iv = std::vector<std::int32_t>;

TEST_CASE("construction validates the caps") {
  CHECK_THROWS_AS(Tbn(0, 5), TbnError);
  CHECK_THROWS_AS(Tbn(2, 0), TbnError);
  const Tbn t(2, 5);
  CHECK(t.empty());
  CHECK_EQ(t.depth_of(Tbn::kClassNode), 0);
  CHECK(t.children_of(Tbn::kClassNode).empty());
}

TEST_CASE("add_edge maintains parent, children and depth bookkeeping") {
  Tbn t(3, 2);
  t.add_edge(Tbn::kClassNode, 0);
  t.add_edge(Tbn::kClassNode, 1);
  t.add_edge(0, 2);
  t.add_edge(2, 3);

  CHECK_EQ(t.size(), 4);
  CHECK_EQ(t.parent_of(2), 0);
  CHECK_EQ(t.parent_of(0), Tbn::kClassNode);
  CHECK_EQ(t.depth_of(3), 3);
  CHECK_EQ(t.children_of(Tbn::kClassNode), iv{0, 1});
  CHECK_EQ(t.children_of(0), iv{2});
  CHECK_EQ(t.nodes(), iv{0, 1, 2, 3});
  CHECK_EQ(t.ancestors_of(3), iv{2, 0});
  CHECK_EQ(t.ancestors_of(0), iv{});
  t.validate();
}

TEST_CASE("add_edge rejects duplicates, unknown parents and cap violations") {
  Tbn t(2, 2);
  t.add_edge(Tbn::kClassNode, 0);
  CHECK_THROWS_AS(t.add_edge(Tbn::kClassNode, 0), TbnError);  // duplicate child
  CHECK_THROWS_AS(t.add_edge(99, 1), TbnError);               // parent not in tree
  t.add_edge(0, 1);
  CHECK_THROWS_AS(t.add_edge(1, 2), TbnError);  // depth 3 > cap 2
  t.add_edge(Tbn::kClassNode, 2);
  CHECK(t.at_child_capacity(Tbn::kClassNode));
  CHECK_THROWS_AS(t.add_edge(Tbn::kClassNode, 3), TbnError);  // child cap
}

TEST_CASE("remove_leaf detaches leaves only") {
  Tbn t(2, 5);
  t.add_edge(Tbn::kClassNode, 0);
  t.add_edge(0, 1);
  CHECK_THROWS_AS(t.remove_leaf(0), TbnError);
  t.remove_leaf(1);
  CHECK(!t.contains(1));
  CHECK(t.children_of(0).empty());
  t.validate();
  CHECK_THROWS_AS(t.remove_leaf(1), TbnError);  // already gone
}

TEST_CASE("swap exchanges a childless child with its parent in place") {
  Tbn t(3, 3);
  t.add_edge(Tbn::kClassNode, 5);
  t.add_edge(Tbn::kClassNode, 7);
  t.add_edge(5, 2);
  t.add_edge(5, 9);
  t.add_edge(2, 4);

  // 9 is a childless child of 5; afterwards 9 sits where 5 was and 5 plus
  // its other children hang under 9.
  t.swap(9, 5);
  CHECK_EQ(t.parent_of(9), Tbn::kClassNode);
  CHECK_EQ(t.children_of(Tbn::kClassNode), iv{9, 7});  // position preserved
  CHECK_EQ(t.children_of(9), iv{5, 2});                // displaced first
  CHECK_EQ(t.parent_of(5), 9);
  CHECK_EQ(t.parent_of(2), 9);
  CHECK_EQ(t.depth_of(9), 1);
  CHECK_EQ(t.depth_of(5), 2);
  CHECK_EQ(t.depth_of(2), 2);
  CHECK_EQ(t.depth_of(4), 3);  // grandchild depth recomputed
  t.validate();
}

TEST_CASE("swap preconditions are enforced") {
  Tbn t(3, 3);
  t.add_edge(Tbn::kClassNode, 0);
  t.add_edge(0, 1);
  t.add_edge(1, 2);
  CHECK_THROWS_AS(t.swap(2, 0), TbnError);  // not a direct child
  CHECK_THROWS_AS(t.swap(1, 0), TbnError);  // incoming has children
  CHECK_THROWS_AS(t.swap(9, 0), TbnError);  // unknown node
}

TEST_CASE("swap at the child cap inherits every child and stays within it") {
  // A displaced parent at the cap hands over itself plus its other children:
  // exactly |children| nodes, so the cap holds and no relaxation fires.
  Tbn t(3, 2);
  t.add_edge(Tbn::kClassNode, 0);
  t.add_edge(0, 1);
  t.add_edge(0, 2);
  t.swap(1, 0);
  CHECK_EQ(t.children_of(1), iv{0, 2});
  t.validate();
  CHECK(t.warnings().empty());
}

TEST_CASE("random edit sequences keep every invariant") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const std::int32_t max_depth = 1 + static_cast<std::int32_t>(bounded_u64(rng, 4));
    const std::int32_t nch = 1 + static_cast<std::int32_t>(bounded_u64(rng, 4));
    Tbn t(max_depth, nch);
    std::int32_t next_id = 0;
    for (int step = 0; step < 120; ++step) {
      const auto nodes = t.nodes();
      const auto op = bounded_u64(rng, 4);
      if (op == 0 || nodes.empty()) {
        // Attach a new node somewhere legal.
        std::vector<std::int32_t> spots{Tbn::kClassNode};
        for (auto n : nodes) spots.push_back(n);
        const auto parent = spots[bounded_u64(rng, spots.size())];
        if (!t.at_child_capacity(parent) && t.depth_of(parent) + 1 <= max_depth)
          t.add_edge(parent, next_id++);
      } else if (op == 1) {
        const auto n = nodes[bounded_u64(rng, nodes.size())];
        if (t.children_of(n).empty()) t.remove_leaf(n);
      } else {
        const auto n = nodes[bounded_u64(rng, nodes.size())];
        const auto& kids = t.children_of(n);
        if (!kids.empty()) {
          const auto child = kids[bounded_u64(rng, kids.size())];
          if (t.children_of(child).empty()) t.swap(child, n);
        }
      }
      t.validate();
      for (auto n : t.nodes()) CHECK(t.depth_of(n) <= max_depth);
    }
  }
}

TEST_CASE("dot output is canonical") {
  Tbn t(2, 5);
  t.add_edge(Tbn::kClassNode, 1);
  t.add_edge(1, 0);
  const std::vector<std::string> names{"alpha", "beta"};
  CHECK_EQ(t.to_dot(names, "label"),
           "digraph tbn {\n"
           "  rankdir=TB;\n"
           "  class [label=\"label\", shape=doublecircle];\n"
           "  n0 [label=\"alpha\", shape=ellipse];\n"
           "  n1 [label=\"beta\", shape=ellipse];\n"
           "  n1 -> n0;\n"
           "  class -> n1;\n"
           "}\n");
}
