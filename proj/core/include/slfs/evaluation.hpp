#ifndef SLFS_EVALUATION_HPP
#define SLFS_EVALUATION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slfs/dataset.hpp"
#include "slfs/engine.hpp"

// Benchmark harness: baseline selectors, reference classifiers and the
// stratified cross-validation loop. Discretization, encoding, selection and
// classifier fitting all happen inside each fold on the training rows only;
// held-out rows are encoded with the training-fold mapping.

namespace slfs {

struct FoldPlan {
  std::int32_t k = 10;
  std::vector<std::int32_t> assignment;  // row -> fold
  std::uint64_t seed = 0;
  bool stratified = true;

  std::vector<std::size_t> test_rows(std::int32_t fold) const;
  std::vector<std::size_t> train_rows(std::int32_t fold) const;
};

/// Seeded stratified assignment; per class, fold sizes differ by at most one.
FoldPlan make_fold_plan(std::span<const std::int32_t> class_codes, std::int32_t k,
                        std::uint64_t seed, bool stratified = true);

/// Greedy max-relevance min-redundancy ranking: first pick maximizes I(f;Y),
/// later picks maximize I(f;Y) - mean_{s in S} I(f;s). Ties to the smaller
/// feature id. Throws ConfigError when m is out of [1, p].
std::vector<std::int32_t> mrmr_select(const DiscreteDataset& data, std::int32_t m);

struct Chi2Entry {
  std::int32_t feature;
  double statistic;
};

/// Pearson chi-square of each feature x class table, descending statistic,
/// ties to the smaller feature id.
std::vector<Chi2Entry> chi2_rank(const DiscreteDataset& data);

enum class KnnMetric { HammingOnCodes, EuclideanOnRaw };

/// Majority vote among the k nearest training rows. Distance ties break by
/// training row index, vote ties by smallest class code.
/// `train` is row-major with `width` values per row.
std::int32_t knn_classify(std::span<const double> train, std::size_t width,
                          std::span<const std::int32_t> labels,
                          std::span<const double> test_row, std::int32_t k,
                          KnnMetric metric);

/// Multinomial Naive Bayes over category codes, additive smoothing. This is
/// deliberately a from-scratch counterpart to the tree classifier so the two
/// can be checked against each other.
class NaiveBayes {
 public:
  void fit(const DiscreteDataset& data, std::span<const std::int32_t> features,
           double alpha = 1.0);
  std::int32_t predict(std::span<const std::int32_t> row) const;
  double accuracy(const DiscreteDataset& data) const;

 private:
  std::vector<std::int32_t> features_;
  std::vector<std::int32_t> arities_;
  std::int32_t n_classes_ = 0;
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> log_cond_;   // per feature: class-major
  std::vector<std::vector<double>> log_floor_;  // per feature: unseen-code mass
};

struct SelectorConfig {
  enum class Kind { Slfs, Mrmr, Chi2, None };
  Kind kind = Kind::Slfs;
  SlfsConfig slfs;
  /// Target size for mrmr/chi2; -1 matches the count a SLFS run with `slfs`
  /// settings selects on the same training fold.
  std::int32_t m = -1;

  std::string name() const;
};

struct ClassifierConfig {
  enum class Kind { Knn, NaiveBayes, Bnslfs, Majority };
  Kind kind = Kind::Knn;
  std::int32_t k = 3;  // KNN neighbor count
  /// Fixed metric for KNN; unset picks Euclidean on raw values unless every
  /// selected feature is categorical, then Hamming on codes.
  std::optional<KnnMetric> metric;
  double alpha = 1.0;  // smoothing for NaiveBayes / Bnslfs

  std::string name() const;
};

struct CvResult {
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation over folds
  std::vector<double> fold_accuracies;
  std::vector<std::int32_t> fold_selected_counts;
  double wall_s = 0.0;
  std::vector<std::string> warnings;
};

/// Per fold: discretize + encode + select + fit on training rows, score the
/// held-out rows. Deterministic given the plan. Bnslfs requires the Slfs
/// selector (it reuses the learned tree). `jobs` > 1 runs folds in parallel;
/// results are merged by fold index so the report does not depend on timing.
CvResult cross_validate(const RawTable& table, const SelectorConfig& selector,
                        const ClassifierConfig& classifier, const FoldPlan& plan,
                        int jobs = 1);

struct BenchmarkRow {
  std::string dataset;
  std::string selector;
  std::string classifier;
  std::int32_t fold;
  double accuracy;
  std::int32_t selected_count;
  double wall_s;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;

  /// One line per (dataset, selector, classifier, fold), stable order.
  std::string to_csv() const;
  /// Rows plus mean/std aggregates keyed by (dataset, selector, classifier).
  std::string to_json_string() const;
};

}  // namespace slfs

#endif  // SLFS_EVALUATION_HPP
