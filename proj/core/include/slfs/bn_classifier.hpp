#ifndef SLFS_BN_CLASSIFIER_HPP
#define SLFS_BN_CLASSIFIER_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slfs/dataset.hpp"
#include "slfs/tbn.hpp"

// Classifier induced by the learned tree: class prior plus one conditional
// probability table per feature edge, fitted by smoothed counting. Under the
// tree factorization only the class node's direct children carry information
// about the label -- deeper features' factors P(f | pa(f)) cancel in the
// class posterior -- so prediction scores sum over depth-1 features only.
// An augmented mode conditions deep tables on (parent, class) instead, for
// experiments; it is not the default.

namespace slfs {

enum class CptMode { TreeFactorization, ClassAugmented };

struct FeatureCpt {
  std::int32_t feature = -1;
  std::int32_t parent = -1;        // Tbn::kClassNode for depth-1 features
  std::int32_t depth = 1;
  std::int32_t arity = 1;          // feature code space
  std::int32_t cond_arity = 1;     // conditioning code space
  /// log P(code | cond), laid out cond-major: log_p[cond * arity + code].
  std::vector<double> log_p;
  /// Per-cond log of the zero-count cell value; out-of-range codes land here.
  std::vector<double> log_floor;
};

struct CptModel {
  double alpha = 1.0;
  CptMode mode = CptMode::TreeFactorization;
  std::int32_t n_classes = 0;
  std::vector<double> log_prior;
  std::vector<FeatureCpt> cpts;  // ascending feature id

  std::string to_json_string() const;
  static CptModel from_json_string(const std::string& text);
};

/// Smoothed maximum-likelihood tables for every feature in the tree.
/// alpha = 0 gives raw frequencies (zero counts become -inf logs).
/// Throws DataError on an empty dataset.
CptModel fit_cpts(const Tbn& tbn, const DiscreteDataset& data, double alpha = 1.0,
                  CptMode mode = CptMode::TreeFactorization);

struct Prediction {
  std::int32_t label = 0;
  std::vector<double> posterior;  // sums to 1
};

/// Scores a single row of feature codes (indexed by feature id). Rows must
/// cover every feature the model references; SchemaError otherwise. Ties in
/// the argmax go to the smallest class index.
Prediction predict(const CptModel& model, std::span<const std::int32_t> row);

/// Fraction of rows whose predicted label matches the class code.
double evaluate_accuracy(const CptModel& model, const DiscreteDataset& data);

}  // namespace slfs

#endif  // SLFS_BN_CLASSIFIER_HPP
