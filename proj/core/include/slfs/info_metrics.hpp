#ifndef SLFS_INFO_METRICS_HPP
#define SLFS_INFO_METRICS_HPP

#include <array>
#include <atomic>
#include <cstdint>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "slfs/dataset.hpp"

// Plug-in (maximum likelihood) estimators for entropy, mutual information and
// conditional mutual information over discrete columns.
//
// Conventions used everywhere in this repository:
//   * log base 2; all values are in bits
//   * empty cells contribute nothing (0 * log 0 == 0)
//   * MI/CMI are clamped to 0 when float error drives them slightly negative
//   * argument pairs are put in a canonical order before summation, so
//     mutual_info(x, y) == mutual_info(y, x) bit for bit

namespace slfs {

/// Column handle used by the cached estimator: feature index, or the class.
using ColRef = std::int32_t;
inline constexpr ColRef kClassCol = -1;

/// Joint count table over one to three discrete columns, row-major layout
/// with the last axis fastest. sum(counts) == total == number of rows.
struct ContingencyTable {
  int rank = 0;
  std::array<std::int32_t, 3> dims{1, 1, 1};
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;

  static ContingencyTable from(std::span<const std::int32_t> x, std::int32_t ax);
  static ContingencyTable from(std::span<const std::int32_t> x, std::int32_t ax,
                               std::span<const std::int32_t> y, std::int32_t ay);
  static ContingencyTable from(std::span<const std::int32_t> x, std::int32_t ax,
                               std::span<const std::int32_t> y, std::int32_t ay,
                               std::span<const std::int32_t> z, std::int32_t az);

  std::int64_t at(std::int32_t i, std::int32_t j = 0, std::int32_t k = 0) const {
    return counts[(static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + k];
  }
};

/// Shannon entropy of a column, in [0, log2(arity)].
double entropy(std::span<const std::int32_t> x, std::int32_t arity);
double entropy(const ContingencyTable& marginal);

/// I(x; y) >= 0, symmetric in its arguments.
double mutual_info(std::span<const std::int32_t> x, std::int32_t ax,
                   std::span<const std::int32_t> y, std::int32_t ay);

/// I(x; y | z) = sum_c p(z=c) I(x; y | z=c), >= 0, symmetric in (x, y).
double cond_mutual_info(std::span<const std::int32_t> x, std::int32_t ax,
                        std::span<const std::int32_t> y, std::int32_t ay,
                        std::span<const std::int32_t> z, std::int32_t az);

/// Both sides of the chain-rule identity
///   I(fj; Y | fi) == I(fi; Y | fj) - (I(fi; Y) - I(fj; Y))
/// evaluated from the same empirical joint. The two values agree to 1e-9
/// whenever all four terms come from the same rows.
std::pair<double, double> chain_identity(std::span<const std::int32_t> fi, std::int32_t ai,
                                         std::span<const std::int32_t> fj, std::int32_t aj,
                                         std::span<const std::int32_t> y, std::int32_t ay);

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
};

/// Memoized entropy / MI / CMI values keyed by column-ref tuples.
/// Concurrent readers are fine; insertion takes the write lock. Two threads
/// may compute the same key at once, in which case both arrive at the same
/// value and either insert wins.
class MiCache {
 public:
  bool lookup_h(ColRef a, double& out) const;
  bool lookup_mi(ColRef a, ColRef b, double& out) const;
  bool lookup_cmi(ColRef a, ColRef b, ColRef cond, double& out) const;
  void store_h(ColRef a, double v);
  void store_mi(ColRef a, ColRef b, double v);
  void store_cmi(ColRef a, ColRef b, ColRef cond, double v);
  CacheStats stats() const;

 private:
  static std::uint64_t pair_key(ColRef a, ColRef b);
  static std::uint64_t triple_key(ColRef a, ColRef b, ColRef cond);

  mutable std::shared_mutex mu_;
  std::unordered_map<std::int64_t, double> h_;
  std::unordered_map<std::uint64_t, double> mi_;
  std::unordered_map<std::uint64_t, double> cmi_;
  mutable std::atomic<std::uint64_t> hits_{0};
  mutable std::atomic<std::uint64_t> misses_{0};
};

/// Estimator bound to one dataset, with optional memoization. Values returned
/// with the cache on are bit-identical to values returned with it off.
class InfoEstimator {
 public:
  explicit InfoEstimator(const DiscreteDataset& data, bool use_cache = true)
      : data_(&data), use_cache_(use_cache) {}

  double entropy(ColRef a) const;
  double mutual_info(ColRef a, ColRef b) const;
  double cond_mutual_info(ColRef a, ColRef b, ColRef cond) const;

  const DiscreteDataset& data() const { return *data_; }
  CacheStats cache_stats() const { return cache_.stats(); }

 private:
  std::span<const std::int32_t> col(ColRef r) const;
  std::int32_t arity(ColRef r) const;

  const DiscreteDataset* data_;
  bool use_cache_;
  mutable MiCache cache_;
};

}  // namespace slfs

#endif  // SLFS_INFO_METRICS_HPP
