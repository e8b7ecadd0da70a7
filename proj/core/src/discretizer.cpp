#include "slfs/discretizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "slfs/errors.hpp"

namespace slfs {

namespace {

double entropy_of_counts(std::span<const std::int64_t> counts, std::int64_t total) {
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h < 0.0 ? 0.0 : h;
}

int classes_present(std::span<const std::int64_t> counts) {
  int k = 0;
  for (auto c : counts)
    if (c > 0) ++k;
  return k;
}

struct SortedColumn {
  std::vector<double> values;        // ascending
  std::vector<std::int32_t> labels;  // aligned with values
  std::int32_t n_classes = 0;
};

// Recursive splitter over the half-open row range [lo, hi) of the sorted
// column. Splits are chosen and applied by row index, so a midpoint that
// rounds onto an observed value cannot misplace rows.
void split_segment(const SortedColumn& col, std::size_t lo, std::size_t hi,
                   std::vector<double>& cuts) {
  const std::size_t n = hi - lo;
  if (n < 2) return;

  const std::size_t nk = static_cast<std::size_t>(col.n_classes);
  std::vector<std::int64_t> total(nk, 0);
  for (std::size_t i = lo; i < hi; ++i) ++total[static_cast<std::size_t>(col.labels[i])];

  // Group rows by distinct value; record each group's end index and whether
  // it is pure, and in which class.
  struct Group {
    std::size_t end;           // one past the last row of the group
    std::int32_t pure_class;   // -1 when mixed
  };
  std::vector<Group> groups;
  {
    std::size_t i = lo;
    while (i < hi) {
      std::size_t j = i;
      std::int32_t cls = col.labels[i];
      bool pure = true;
      while (j < hi && col.values[j] == col.values[i]) {
        if (col.labels[j] != cls) pure = false;
        ++j;
      }
      groups.push_back({j, pure ? cls : -1});
      i = j;
    }
  }
  if (groups.size() < 2) return;

  // Scan boundaries left to right, keeping left-side class counts. A
  // boundary between two groups pure in the same class is not a class
  // boundary and is skipped.
  std::vector<std::int64_t> left(nk, 0);
  std::vector<std::int64_t> best_left;
  double best_e = std::numeric_limits<double>::infinity();
  std::size_t best_split = 0;  // row index; 0 = none found

  std::size_t row = lo;
  for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
    for (; row < groups[g].end; ++row) ++left[static_cast<std::size_t>(col.labels[row])];
    if (groups[g].pure_class != -1 && groups[g].pure_class == groups[g + 1].pure_class)
      continue;

    const std::int64_t n1 = static_cast<std::int64_t>(groups[g].end - lo);
    const std::int64_t n2 = static_cast<std::int64_t>(n) - n1;
    std::vector<std::int64_t> right(nk);
    for (std::size_t c = 0; c < nk; ++c) right[c] = total[c] - left[c];
    const double e = (static_cast<double>(n1) * entropy_of_counts(left, n1) +
                      static_cast<double>(n2) * entropy_of_counts(right, n2)) /
                     static_cast<double>(n);
    if (e < best_e) {  // strict: ties keep the earlier (smaller) threshold
      best_e = e;
      best_split = groups[g].end;
      best_left = left;
    }
  }
  if (best_split == 0) return;

  const double hs = entropy_of_counts(total, static_cast<std::int64_t>(n));
  const double gain = hs - best_e;

  const std::int64_t n1 = static_cast<std::int64_t>(best_split - lo);
  const std::int64_t n2 = static_cast<std::int64_t>(n) - n1;
  std::vector<std::int64_t> right(nk);
  for (std::size_t c = 0; c < nk; ++c) right[c] = total[c] - best_left[c];

  const int k = classes_present(total);
  const int k1 = classes_present(best_left);
  const int k2 = classes_present(right);
  const double h1 = entropy_of_counts(best_left, n1);
  const double h2 = entropy_of_counts(right, n2);
  const double delta =
      std::log2(std::pow(3.0, k) - 2.0) - (k * hs - k1 * h1 - k2 * h2);
  const double threshold =
      (std::log2(static_cast<double>(n) - 1.0) + delta) / static_cast<double>(n);
  if (gain <= threshold) return;

  cuts.push_back((col.values[best_split - 1] + col.values[best_split]) / 2.0);
  split_segment(col, lo, best_split, cuts);
  split_segment(col, best_split, hi, cuts);
}

}  // namespace

std::vector<double> mdlp_cuts(std::span<const double> values,
                              std::span<const std::int32_t> labels) {
  if (values.size() != labels.size())
    throw DataError("mdlp_cuts: values and labels differ in length");

  SortedColumn col;
  col.values.reserve(values.size());
  col.labels.reserve(values.size());
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  for (auto i : order) {
    if (std::isnan(values[i])) continue;
    col.values.push_back(values[i]);
    col.labels.push_back(labels[i]);
    col.n_classes = std::max(col.n_classes, labels[i] + 1);
  }
  if (col.values.size() < 2 || col.n_classes < 1) return {};

  std::vector<double> cuts;
  split_segment(col, 0, col.values.size(), cuts);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

std::vector<CutList> discretize_all(const RawTable& table,
                                    std::span<const std::int32_t> class_codes) {
  if (class_codes.size() != table.n_rows)
    throw DataError("discretize_all: class codes do not align with table rows");

  std::vector<CutList> out;
  for (std::size_t ci : table.feature_columns()) {
    const Column& col = table.columns[ci];
    if (col.kind != ColumnKind::Numeric) continue;

    std::vector<double> vals;
    std::vector<std::int32_t> labs;
    vals.reserve(table.n_rows);
    labs.reserve(table.n_rows);
    for (std::size_t r = 0; r < table.n_rows; ++r) {
      if (col.missing[r]) continue;
      vals.push_back(col.numeric[r]);
      labs.push_back(class_codes[r]);
    }
    CutList cl;
    cl.column = static_cast<std::int32_t>(ci);
    cl.cuts = mdlp_cuts(vals, labs);
    out.push_back(std::move(cl));
  }
  return out;
}

}  // namespace slfs
