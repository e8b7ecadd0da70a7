#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "slfs/info_metrics.hpp"

using namespace slfs;
using iv = std::vector<std::int32_t>;

namespace {
// Four binary columns over 8 rows used throughout the engine tests as well.
// f1 carries class signal, f0 and f2 are independent of the class.
const iv kY{0, 0, 0, 0, 1, 1, 1, 1};
const iv kF0{0, 0, 1, 1, 0, 0, 1, 1};
const iv kF1{0, 0, 0, 1, 1, 1, 1, 0};
const iv kF2{0, 1, 0, 1, 0, 1, 0, 1};
}  // namespace

TEST_CASE("entropy matches hand-computed values") {
  CHECK_EQ(entropy(iv{0, 0, 0, 1}, 2), doctest::Approx(0.8112781244591328).epsilon(1e-12));
  CHECK_EQ(entropy(kY, 2), 1.0);
  CHECK_EQ(entropy(iv{3, 3, 3}, 4), 0.0);
  CHECK_EQ(entropy(iv{0, 1, 2, 3}, 4), 2.0);
}

TEST_CASE("entropy stays in [0, log2(arity)] on random columns") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int32_t arity = 2 + static_cast<std::int32_t>(bounded_u64(rng, 5));
    iv x(1 + bounded_u64(rng, 60));
    for (auto& v : x) v = static_cast<std::int32_t>(bounded_u64(rng, arity));
    const double h = entropy(x, arity);
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(static_cast<double>(arity)) + 1e-12);
    CHECK_EQ(h, doctest::Approx(oracle::entropy(x)).epsilon(1e-12));
  }
}

TEST_CASE("mutual information matches hand-computed values") {
  // Joint counts [[2,1],[1,2]] over 6 rows.
  const iv x{0, 0, 0, 1, 1, 1};
  const iv y{0, 0, 1, 0, 1, 1};
  CHECK_EQ(mutual_info(x, 2, y, 2), doctest::Approx(0.08170416594551039).epsilon(1e-12));

  CHECK_EQ(mutual_info(kF1, 2, kY, 2), doctest::Approx(0.18872187554086717).epsilon(1e-12));
  CHECK_EQ(mutual_info(kF0, 2, kY, 2), 0.0);
  CHECK_EQ(mutual_info(kF2, 2, kY, 2), 0.0);
  CHECK_EQ(mutual_info(kF0, 2, kF1, 2), 0.0);
  CHECK_EQ(mutual_info(kY, 2, kY, 2), 1.0);  // I(x;x) == H(x)
}

TEST_CASE("mutual information is bit-for-bit symmetric") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::int32_t ax = 2 + static_cast<std::int32_t>(bounded_u64(rng, 4));
    const std::int32_t ay = 2 + static_cast<std::int32_t>(bounded_u64(rng, 4));
    iv x(2 + bounded_u64(rng, 50)), y(x.size());
    for (auto& v : x) v = static_cast<std::int32_t>(bounded_u64(rng, ax));
    for (auto& v : y) v = static_cast<std::int32_t>(bounded_u64(rng, ay));
    CHECK_EQ(mutual_info(x, ax, y, ay), mutual_info(y, ay, x, ax));
  }
}

TEST_CASE("mutual information agrees with the map-based oracle") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int32_t ax = 2 + static_cast<std::int32_t>(bounded_u64(rng, 4));
    const std::int32_t ay = 2 + static_cast<std::int32_t>(bounded_u64(rng, 4));
    iv x(2 + bounded_u64(rng, 80)), y(x.size());
    for (auto& v : x) v = static_cast<std::int32_t>(bounded_u64(rng, ax));
    for (auto& v : y) v = static_cast<std::int32_t>(bounded_u64(rng, ay));
    const double got = mutual_info(x, ax, y, ay);
    CHECK_EQ(got, doctest::Approx(oracle::mutual_info(x, y)).epsilon(1e-11));
    CHECK(got >= 0.0);
  }
}

TEST_CASE("conditional mutual information matches hand-computed values") {
  CHECK_EQ(cond_mutual_info(kF0, 2, kY, 2, kF1, 2),
           doctest::Approx(0.31127812445913283).epsilon(1e-12));
  CHECK_EQ(cond_mutual_info(kF1, 2, kY, 2, kF0, 2), doctest::Approx(0.5).epsilon(1e-12));
  CHECK_EQ(cond_mutual_info(kF2, 2, kY, 2, kF1, 2),
           doctest::Approx(0.31127812445913283).epsilon(1e-12));
}

TEST_CASE("conditional mutual information agrees with the oracle and is symmetric") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 150; ++trial) {
    const std::int32_t a = 2 + static_cast<std::int32_t>(bounded_u64(rng, 3));
    const std::int32_t b = 2 + static_cast<std::int32_t>(bounded_u64(rng, 3));
    const std::int32_t c = 2 + static_cast<std::int32_t>(bounded_u64(rng, 3));
    iv x(3 + bounded_u64(rng, 60)), y(x.size()), z(x.size());
    for (auto& v : x) v = static_cast<std::int32_t>(bounded_u64(rng, a));
    for (auto& v : y) v = static_cast<std::int32_t>(bounded_u64(rng, b));
    for (auto& v : z) v = static_cast<std::int32_t>(bounded_u64(rng, c));
    const double got = cond_mutual_info(x, a, y, b, z, c);
    CHECK_EQ(got, doctest::Approx(oracle::cond_mutual_info(x, y, z)).epsilon(1e-11));
    CHECK(got >= 0.0);
    CHECK_EQ(got, cond_mutual_info(y, b, x, a, z, c));
  }
}

TEST_CASE("chain identity holds on the fixed fixture") {
  const auto [lhs, rhs] = chain_identity(kF0, 2, kF1, 2, kY, 2);
  CHECK_EQ(lhs, doctest::Approx(0.5).epsilon(1e-12));
  CHECK_EQ(rhs, doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::fabs(lhs - rhs) <= 1e-9);
}

TEST_CASE("chain identity holds on random datasets") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 300; ++trial) {
    const std::int32_t ai = 2 + static_cast<std::int32_t>(bounded_u64(rng, 4));
    const std::int32_t aj = 2 + static_cast<std::int32_t>(bounded_u64(rng, 4));
    const std::int32_t ay = 2 + static_cast<std::int32_t>(bounded_u64(rng, 3));
    iv fi(4 + bounded_u64(rng, 100)), fj(fi.size()), y(fi.size());
    for (auto& v : fi) v = static_cast<std::int32_t>(bounded_u64(rng, ai));
    for (auto& v : fj) v = static_cast<std::int32_t>(bounded_u64(rng, aj));
    for (auto& v : y) v = static_cast<std::int32_t>(bounded_u64(rng, ay));
    const auto [lhs, rhs] = chain_identity(fi, ai, fj, aj, y, ay);
    CHECK(std::fabs(lhs - rhs) <= 1e-9);
  }
}

TEST_CASE("contingency table layout is row-major with the last axis fastest") {
  const iv x{0, 0, 1, 1, 1};
  const iv y{0, 1, 0, 1, 1};
  const auto t = ContingencyTable::from(x, 2, y, 2);
  CHECK_EQ(t.rank, 2);
  CHECK_EQ(t.total, 5);
  CHECK_EQ(t.at(0, 0), 1);
  CHECK_EQ(t.at(0, 1), 1);
  CHECK_EQ(t.at(1, 0), 1);
  CHECK_EQ(t.at(1, 1), 2);
  CHECK_EQ(entropy(ContingencyTable::from(iv{0, 0, 0, 1}, 2)),
           doctest::Approx(0.8112781244591328).epsilon(1e-12));
}

TEST_CASE("estimator values are identical with and without the cache") {
  std::mt19937_64 rng(16);
  const auto ds = oracle::random_dataset(rng, 120, 6, 4, 3);
  const InfoEstimator cached(ds, true);
  const InfoEstimator plain(ds, false);
  for (ColRef a = 0; a < 6; ++a) {
    CHECK_EQ(cached.entropy(a), plain.entropy(a));
    CHECK_EQ(cached.mutual_info(a, kClassCol), plain.mutual_info(a, kClassCol));
    for (ColRef b = 0; b < 6; ++b) {
      if (a == b) continue;
      CHECK_EQ(cached.mutual_info(a, b), plain.mutual_info(a, b));
      CHECK_EQ(cached.cond_mutual_info(a, kClassCol, b),
               plain.cond_mutual_info(a, kClassCol, b));
    }
  }
}

TEST_CASE("cache records hits on repeated queries, symmetric keys included") {
  std::mt19937_64 rng(17);
  const auto ds = oracle::random_dataset(rng, 50, 3, 3, 2);
  const InfoEstimator est(ds, true);
  const double first = est.mutual_info(0, 1);
  const auto before = est.cache_stats();
  CHECK_EQ(est.mutual_info(1, 0), first);  // reversed pair must hit
  const auto after = est.cache_stats();
  CHECK_EQ(after.hits, before.hits + 1);
  CHECK_EQ(after.misses, before.misses);
}

TEST_CASE("class column handle resolves to the class codes") {
  DiscreteDataset ds;
  ds.features = {iv{0, 0, 1, 1}};
  ds.arities = {2};
  ds.class_codes = iv{0, 1, 0, 1};
  ds.n_classes = 2;
  ds.feature_names = {"f0"};
  const InfoEstimator est(ds);
  CHECK_EQ(est.entropy(kClassCol), 1.0);
  CHECK_EQ(est.mutual_info(0, kClassCol), 0.0);
}
