#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "slfs/dataset.hpp"
#include "slfs/discretizer.hpp"
#include "slfs/rng.hpp"

using namespace slfs;
using dv = std::vector<double>;
using iv = std::vector<std::int32_t>;

TEST_CASE("a clean two-class boundary yields exactly the midpoint cut") {
  CHECK_EQ(mdlp_cuts(dv{1, 2, 3, 4}, iv{0, 0, 1, 1}), dv{2.5});
}

TEST_CASE("alternating labels give no information and no cut") {
  CHECK_EQ(mdlp_cuts(dv{1, 2, 3, 4}, iv{0, 1, 0, 1}), dv{});
}

TEST_CASE("three class blocks split recursively into two cuts") {
  dv values;
  iv labels;
  for (int i = 0; i < 12; ++i) {
    values.push_back(static_cast<double>(i + 1));
    labels.push_back(i / 4);
  }
  CHECK_EQ(mdlp_cuts(values, labels), dv{4.5, 8.5});

  values.clear();
  labels.clear();
  for (int i = 0; i < 30; ++i) {
    values.push_back(static_cast<double>(i));
    labels.push_back(i / 10);
  }
  CHECK_EQ(mdlp_cuts(values, labels), dv{9.5, 19.5});
}

TEST_CASE("degenerate inputs yield no cuts") {
  CHECK_EQ(mdlp_cuts(dv{}, iv{}), dv{});
  CHECK_EQ(mdlp_cuts(dv{3.0}, iv{0}), dv{});
  CHECK_EQ(mdlp_cuts(dv{2, 2, 2, 2}, iv{0, 1, 0, 1}), dv{});
  CHECK_EQ(mdlp_cuts(dv{1, 2, 3}, iv{1, 1, 1}), dv{});
}

TEST_CASE("NaN values are ignored when placing cuts") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_EQ(mdlp_cuts(dv{1, nan, 2, 3, nan, 4}, iv{0, 1, 0, 1, 0, 1}),
           mdlp_cuts(dv{1, 2, 3, 4}, iv{0, 0, 1, 1}));
}

TEST_CASE("cuts are invariant under row permutation") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20 + bounded_u64(rng, 80);
    dv values(n);
    iv labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = static_cast<double>(bounded_u64(rng, 15));
      labels[i] = static_cast<std::int32_t>(bounded_u64(rng, 3));
    }
    const dv base = mdlp_cuts(values, labels);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    deterministic_shuffle(order, rng);
    dv pv(n);
    iv pl(n);
    for (std::size_t i = 0; i < n; ++i) {
      pv[i] = values[order[i]];
      pl[i] = labels[order[i]];
    }
    CHECK_EQ(mdlp_cuts(pv, pl), base);
  }
}

TEST_CASE("cuts are strictly increasing, lie between observed values and only at class boundaries") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t n = 10 + bounded_u64(rng, 200);
    dv values(n);
    iv labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = static_cast<double>(bounded_u64(rng, 25));
      labels[i] = static_cast<std::int32_t>(bounded_u64(rng, 4));
    }
    const dv cuts = mdlp_cuts(values, labels);
    for (std::size_t i = 1; i < cuts.size(); ++i) CHECK(cuts[i - 1] < cuts[i]);
    if (cuts.empty()) continue;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    for (double c : cuts) {
      CHECK(c > *lo);
      CHECK(c < *hi);
      // Every cut separates two distinct observed values.
      bool below = false, above = false;
      for (double v : values) {
        below = below || v < c;
        above = above || v > c;
      }
      CHECK(below);
      CHECK(above);
    }
  }
}

TEST_CASE("a strong signal keeps its cut under mild label noise") {
  std::mt19937_64 rng(23);
  dv values;
  iv labels;
  for (int i = 0; i < 200; ++i) {
    values.push_back(static_cast<double>(i));
    const bool flip = bounded_u64(rng, 100) < 5;
    labels.push_back((i < 100) != flip ? 0 : 1);
  }
  const dv cuts = mdlp_cuts(values, labels);
  REQUIRE(!cuts.empty());
  bool near_boundary = false;
  for (double c : cuts) near_boundary = near_boundary || std::fabs(c - 99.5) < 6.0;
  CHECK(near_boundary);
}

TEST_CASE("discretize_all covers numeric feature columns only, with table indices") {
  RawTable t;
  t.n_rows = 4;
  Column num;
  num.name = "x";
  num.kind = ColumnKind::Numeric;
  num.numeric = {1, 2, 3, 4};
  num.missing = {0, 0, 0, 0};
  Column cat;
  cat.name = "c";
  cat.kind = ColumnKind::Categorical;
  cat.categorical = {"u", "u", "v", "v"};
  cat.missing = {0, 0, 0, 0};
  Column label;
  label.name = "y";
  label.kind = ColumnKind::Categorical;
  label.categorical = {"a", "a", "b", "b"};
  label.missing = {0, 0, 0, 0};
  t.columns = {cat, num, label};
  t.class_column = 2;

  const auto cuts = discretize_all(t, iv{0, 0, 1, 1});
  REQUIRE_EQ(cuts.size(), 1);
  CHECK_EQ(cuts[0].column, 1);
  CHECK_EQ(cuts[0].cuts, dv{2.5});
}

TEST_CASE("rows with a missing numeric cell do not influence the cuts") {
  RawTable t;
  t.n_rows = 5;
  Column num;
  num.name = "x";
  num.kind = ColumnKind::Numeric;
  num.numeric = {1, 2, 0, 3, 4};
  num.missing = {0, 0, 1, 0, 0};
  Column label;
  label.name = "y";
  label.kind = ColumnKind::Categorical;
  label.categorical = {"a", "a", "b", "b", "b"};
  label.missing = {0, 0, 0, 0, 0};
  t.columns = {num, label};
  t.class_column = 1;

  const auto cuts = discretize_all(t, iv{0, 0, 1, 1, 1});
  REQUIRE_EQ(cuts.size(), 1);
  CHECK_EQ(cuts[0].cuts, dv{2.5});
}
