#ifndef SLFS_DISCRETIZER_HPP
#define SLFS_DISCRETIZER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "slfs/dataset.hpp"

// Supervised multi-interval discretization: recursive binary splits that
// minimize class-information entropy, with the minimum-description-length
// stopping rule. A split of segment S (n rows, k classes present) into
// S1/S2 is accepted iff
//
//   Gain(S;T) > log2(n-1)/n + Delta(S;T)/n
//   Delta    = log2(3^k - 2) - (k*H(S) - k1*H(S1) - k2*H(S2))
//
// Candidate thresholds are midpoints between adjacent distinct values and are
// restricted to class boundaries: a midpoint is skipped when the two value
// groups around it are pure in the same class. Equal-entropy candidates
// resolve to the smallest threshold.

namespace slfs {

/// Cut thresholds for one real-valued column given its class labels.
/// Degenerate inputs (constant column, single row) yield an empty list.
std::vector<double> mdlp_cuts(std::span<const double> values,
                              std::span<const std::int32_t> labels);

/// One CutList per numeric column of the table (categorical columns are
/// skipped); `class_codes` must align with the table rows. Missing numeric
/// cells are ignored when placing cuts.
std::vector<CutList> discretize_all(const RawTable& table,
                                    std::span<const std::int32_t> class_codes);

}  // namespace slfs

#endif  // SLFS_DISCRETIZER_HPP
