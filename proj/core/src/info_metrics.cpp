#include "slfs/info_metrics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <mutex>

#include "slfs/errors.hpp"

namespace slfs {

namespace {

double clamp_nonneg(double v) { return v < 0.0 ? 0.0 : v; }

// Canonical orientation for a column pair: smaller arity first, content as
// the tiebreaker. Guarantees bit-exact symmetry of the pairwise estimators.
bool should_swap_pair(std::span<const std::int32_t> x, std::int32_t ax,
                      std::span<const std::int32_t> y, std::int32_t ay) {
  if (ax != ay) return ax > ay;
  return std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end());
}

void check_column(std::span<const std::int32_t> x, std::int32_t arity) {
  if (x.empty()) throw DataError("estimator: empty column");
  if (arity < 1) throw DataError("estimator: arity must be >= 1");
}

}  // namespace

ContingencyTable ContingencyTable::from(std::span<const std::int32_t> x, std::int32_t ax) {
  check_column(x, ax);
  ContingencyTable t;
  t.rank = 1;
  t.dims = {ax, 1, 1};
  t.counts.assign(static_cast<std::size_t>(ax), 0);
  for (auto v : x) ++t.counts[static_cast<std::size_t>(v)];
  t.total = static_cast<std::int64_t>(x.size());
  return t;
}

ContingencyTable ContingencyTable::from(std::span<const std::int32_t> x, std::int32_t ax,
                                        std::span<const std::int32_t> y, std::int32_t ay) {
  check_column(x, ax);
  check_column(y, ay);
  if (x.size() != y.size()) throw DataError("estimator: column length mismatch");
  ContingencyTable t;
  t.rank = 2;
  t.dims = {ax, ay, 1};
  t.counts.assign(static_cast<std::size_t>(ax) * ay, 0);
  for (std::size_t i = 0; i < x.size(); ++i)
    ++t.counts[static_cast<std::size_t>(x[i]) * ay + y[i]];
  t.total = static_cast<std::int64_t>(x.size());
  return t;
}

ContingencyTable ContingencyTable::from(std::span<const std::int32_t> x, std::int32_t ax,
                                        std::span<const std::int32_t> y, std::int32_t ay,
                                        std::span<const std::int32_t> z, std::int32_t az) {
  check_column(x, ax);
  check_column(y, ay);
  check_column(z, az);
  if (x.size() != y.size() || x.size() != z.size())
    throw DataError("estimator: column length mismatch");
  ContingencyTable t;
  t.rank = 3;
  t.dims = {ax, ay, az};
  t.counts.assign(static_cast<std::size_t>(ax) * ay * az, 0);
  for (std::size_t i = 0; i < x.size(); ++i)
    ++t.counts[(static_cast<std::size_t>(x[i]) * ay + y[i]) * az + z[i]];
  t.total = static_cast<std::int64_t>(x.size());
  return t;
}

double entropy(const ContingencyTable& marginal) {
  assert(marginal.rank == 1);
  const double n = static_cast<double>(marginal.total);
  double h = 0.0;
  for (auto c : marginal.counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return clamp_nonneg(h);
}

double entropy(std::span<const std::int32_t> x, std::int32_t arity) {
  return entropy(ContingencyTable::from(x, arity));
}

namespace {

// I(x;y) from a 2-way table, summing cells row-major. Callers fix the
// orientation first.
double mi_from_table(const ContingencyTable& t) {
  const std::int32_t ax = t.dims[0], ay = t.dims[1];
  const double n = static_cast<double>(t.total);
  std::vector<std::int64_t> rx(ax, 0), ry(ay, 0);
  for (std::int32_t a = 0; a < ax; ++a)
    for (std::int32_t b = 0; b < ay; ++b) {
      const std::int64_t c = t.counts[static_cast<std::size_t>(a) * ay + b];
      rx[a] += c;
      ry[b] += c;
    }
  double mi = 0.0;
  for (std::int32_t a = 0; a < ax; ++a) {
    if (rx[a] == 0) continue;
    for (std::int32_t b = 0; b < ay; ++b) {
      const std::int64_t c = t.counts[static_cast<std::size_t>(a) * ay + b];
      if (c == 0 || ry[b] == 0) continue;
      const double p = static_cast<double>(c) / n;
      mi += p * std::log2((static_cast<double>(c) * n) /
                          (static_cast<double>(rx[a]) * static_cast<double>(ry[b])));
    }
  }
  return clamp_nonneg(mi);
}

}  // namespace

double mutual_info(std::span<const std::int32_t> x, std::int32_t ax,
                   std::span<const std::int32_t> y, std::int32_t ay) {
  if (should_swap_pair(x, ax, y, ay)) {
    std::swap(x, y);
    std::swap(ax, ay);
  }
  return mi_from_table(ContingencyTable::from(x, ax, y, ay));
}

double cond_mutual_info(std::span<const std::int32_t> x, std::int32_t ax,
                        std::span<const std::int32_t> y, std::int32_t ay,
                        std::span<const std::int32_t> z, std::int32_t az) {
  if (should_swap_pair(x, ax, y, ay)) {
    std::swap(x, y);
    std::swap(ax, ay);
  }
  const ContingencyTable t = ContingencyTable::from(x, ax, y, ay, z, az);
  const double n = static_cast<double>(t.total);

  // Marginals n(a,c), n(b,c), n(c).
  std::vector<std::int64_t> nac(static_cast<std::size_t>(ax) * az, 0);
  std::vector<std::int64_t> nbc(static_cast<std::size_t>(ay) * az, 0);
  std::vector<std::int64_t> nc(az, 0);
  for (std::int32_t a = 0; a < ax; ++a)
    for (std::int32_t b = 0; b < ay; ++b)
      for (std::int32_t c = 0; c < az; ++c) {
        const std::int64_t v = t.at(a, b, c);
        nac[static_cast<std::size_t>(a) * az + c] += v;
        nbc[static_cast<std::size_t>(b) * az + c] += v;
        nc[c] += v;
      }

  // sum_c p(c) * I(x;y | z=c), each slice summed row-major.
  double cmi = 0.0;
  for (std::int32_t c = 0; c < az; ++c) {
    if (nc[c] == 0) continue;
    const double ncd = static_cast<double>(nc[c]);
    double slice = 0.0;
    for (std::int32_t a = 0; a < ax; ++a) {
      const std::int64_t na = nac[static_cast<std::size_t>(a) * az + c];
      if (na == 0) continue;
      for (std::int32_t b = 0; b < ay; ++b) {
        const std::int64_t v = t.at(a, b, c);
        if (v == 0) continue;
        const std::int64_t nb = nbc[static_cast<std::size_t>(b) * az + c];
        slice += (static_cast<double>(v) / ncd) *
                 std::log2((static_cast<double>(v) * ncd) /
                           (static_cast<double>(na) * static_cast<double>(nb)));
      }
    }
    cmi += (ncd / n) * clamp_nonneg(slice);
  }
  return clamp_nonneg(cmi);
}

std::pair<double, double> chain_identity(std::span<const std::int32_t> fi, std::int32_t ai,
                                         std::span<const std::int32_t> fj, std::int32_t aj,
                                         std::span<const std::int32_t> y, std::int32_t ay) {
  const double lhs = cond_mutual_info(fj, aj, y, ay, fi, ai);
  const double rhs = cond_mutual_info(fi, ai, y, ay, fj, aj) -
                     (mutual_info(fi, ai, y, ay) - mutual_info(fj, aj, y, ay));
  return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// MiCache

std::uint64_t MiCache::pair_key(ColRef a, ColRef b) {
  // Refs are >= -1; shift into unsigned space, 21 bits each.
  const std::uint64_t ua = static_cast<std::uint64_t>(a + 1);
  const std::uint64_t ub = static_cast<std::uint64_t>(b + 1);
  return (ua << 21) | ub;
}

std::uint64_t MiCache::triple_key(ColRef a, ColRef b, ColRef cond) {
  const std::uint64_t uc = static_cast<std::uint64_t>(cond + 1);
  return (pair_key(a, b) << 21) | uc;
}

bool MiCache::lookup_h(ColRef a, double& out) const {
  {
    std::shared_lock lock(mu_);
    auto it = h_.find(a);
    if (it != h_.end()) {
      out = it->second;
      hits_.fetch_add(1, std::memory_order_relaxed);
      return true;
    }
  }
  misses_.fetch_add(1, std::memory_order_relaxed);
  return false;
}

bool MiCache::lookup_mi(ColRef a, ColRef b, double& out) const {
  const auto key = pair_key(std::min(a, b), std::max(a, b));
  {
    std::shared_lock lock(mu_);
    auto it = mi_.find(key);
    if (it != mi_.end()) {
      out = it->second;
      hits_.fetch_add(1, std::memory_order_relaxed);
      return true;
    }
  }
  misses_.fetch_add(1, std::memory_order_relaxed);
  return false;
}

bool MiCache::lookup_cmi(ColRef a, ColRef b, ColRef cond, double& out) const {
  const auto key = triple_key(std::min(a, b), std::max(a, b), cond);
  {
    std::shared_lock lock(mu_);
    auto it = cmi_.find(key);
    if (it != cmi_.end()) {
      out = it->second;
      hits_.fetch_add(1, std::memory_order_relaxed);
      return true;
    }
  }
  misses_.fetch_add(1, std::memory_order_relaxed);
  return false;
}

void MiCache::store_h(ColRef a, double v) {
  std::unique_lock lock(mu_);
  h_.emplace(a, v);
}

void MiCache::store_mi(ColRef a, ColRef b, double v) {
  std::unique_lock lock(mu_);
  mi_.emplace(pair_key(std::min(a, b), std::max(a, b)), v);
}

void MiCache::store_cmi(ColRef a, ColRef b, ColRef cond, double v) {
  std::unique_lock lock(mu_);
  cmi_.emplace(triple_key(std::min(a, b), std::max(a, b), cond), v);
}

CacheStats MiCache::stats() const {
  return {hits_.load(std::memory_order_relaxed), misses_.load(std::memory_order_relaxed)};
}

// ---------------------------------------------------------------------------
// InfoEstimator

std::span<const std::int32_t> InfoEstimator::col(ColRef r) const {
  if (r == kClassCol) return data_->class_codes;
  return data_->features[static_cast<std::size_t>(r)];
}

std::int32_t InfoEstimator::arity(ColRef r) const {
  if (r == kClassCol) return data_->n_classes;
  return data_->arities[static_cast<std::size_t>(r)];
}

double InfoEstimator::entropy(ColRef a) const {
  double v;
  if (use_cache_ && cache_.lookup_h(a, v)) return v;
  v = slfs::entropy(col(a), arity(a));
  if (use_cache_) cache_.store_h(a, v);
  return v;
}

double InfoEstimator::mutual_info(ColRef a, ColRef b) const {
  double v;
  if (use_cache_ && cache_.lookup_mi(a, b, v)) return v;
  const ColRef lo = std::min(a, b), hi = std::max(a, b);
  v = slfs::mutual_info(col(lo), arity(lo), col(hi), arity(hi));
  if (use_cache_) cache_.store_mi(a, b, v);
  return v;
}

double InfoEstimator::cond_mutual_info(ColRef a, ColRef b, ColRef cond) const {
  double v;
  if (use_cache_ && cache_.lookup_cmi(a, b, cond, v)) return v;
  const ColRef lo = std::min(a, b), hi = std::max(a, b);
  v = slfs::cond_mutual_info(col(lo), arity(lo), col(hi), arity(hi), col(cond), arity(cond));
  if (use_cache_) cache_.store_cmi(a, b, cond, v);
  return v;
}

}  // namespace slfs
