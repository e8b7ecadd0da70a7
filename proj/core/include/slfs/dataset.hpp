#ifndef SLFS_DATASET_HPP
#define SLFS_DATASET_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace slfs {

enum class ColumnKind { Numeric, Categorical };

/// One named column of raw data. Exactly one of the two payload vectors is
/// populated, matching `kind`; `missing` flags cells that held the missing
/// marker or failed to parse.
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Categorical;
  std::vector<double> numeric;
  std::vector<std::string> categorical;
  std::vector<std::uint8_t> missing;

  std::size_t size() const {
    return kind == ColumnKind::Numeric ? numeric.size() : categorical.size();
  }
  bool any_missing() const;
};

/// Tabular data as loaded: typed columns plus the index of the label column.
struct RawTable {
  std::vector<Column> columns;
  std::size_t class_column = 0;
  std::size_t n_rows = 0;

  const Column& class_col() const { return columns[class_column]; }
  /// Column indices of the features (everything except the class), in order.
  std::vector<std::size_t> feature_columns() const;
  /// Row-subset copy; `rows` are indices into this table, kept in given order.
  RawTable select_rows(std::span<const std::size_t> rows) const;
};

struct CsvOptions {
  char delimiter = ',';
  std::string missing_marker = "?";
};

/// Optional per-column type overrides, keyed by column name.
using SchemaHints = std::unordered_map<std::string, ColumnKind>;

/// Reads a CSV with a header row. Columns parse as numeric when every
/// non-missing cell is a number; hints override the inference. The class
/// column is always treated as categorical. `class_column` is matched as a
/// header name first, then as a 0-based index if it is all digits.
/// Throws DataError on I/O failure, missing class column, zero data rows or
/// ragged rows.
RawTable load_csv(const std::string& path, const std::string& class_column,
                  const SchemaHints& hints = {}, const CsvOptions& opts = {});

enum class MissingPolicy {
  /// Median for numeric cells, a dedicated "missing" category for
  /// categorical cells. Keeps every row.
  Impute,
  /// Drop any row containing a missing cell. Throws DataError when no rows
  /// remain.
  DropRows,
};

RawTable handle_missing(const RawTable& table, MissingPolicy policy = MissingPolicy::Impute);

/// Column-major matrix of small-integer category codes plus the class column.
/// Arities record the code-space size of each feature; class codes fall in
/// [0, n_classes).
struct DiscreteDataset {
  std::vector<std::vector<std::int32_t>> features;
  std::vector<std::int32_t> arities;
  std::vector<std::int32_t> class_codes;
  std::int32_t n_classes = 0;
  std::vector<std::string> feature_names;

  std::size_t n_rows() const { return class_codes.size(); }
  std::int32_t n_features() const { return static_cast<std::int32_t>(features.size()); }
};

/// Strictly increasing thresholds for one numeric column; empty = single bin.
struct CutList {
  std::int32_t column = -1;
  std::vector<double> cuts;
};

/// Fitted encoding: per-column category maps and bin compaction, plus the
/// class alphabet. Fitting and applying are split so that cross-validation
/// folds can encode held-out rows with the training-fold mapping.
///
/// Rules, all deterministic:
///   * categorical codes are assigned by first appearance in the fit table;
///     values unseen at fit time map to code 0
///   * numeric values map to bin = count of cuts <= value; bins empty in the
///     fit table are squeezed out (codes stay dense) and later values landing
///     in a squeezed bin clamp to the nearest kept bin, ties toward the lower
///   * class labels are coded by first appearance unless an explicit alphabet
///     is supplied (used by the CV harness so folds share label codes)
class Encoder {
 public:
  static Encoder fit(const RawTable& table, const std::vector<CutList>& cuts,
                     const std::vector<std::string>* class_alphabet = nullptr);
  DiscreteDataset apply(const RawTable& table) const;

  const std::vector<std::string>& class_labels() const { return class_labels_; }

  std::string to_json_string() const;
  static Encoder from_json_string(const std::string& text);

 private:
  struct ColumnCodec {
    std::string name;
    ColumnKind kind = ColumnKind::Categorical;
    std::vector<double> cuts;                // numeric
    std::vector<std::int32_t> bin_to_code;   // numeric: raw bin -> dense code
    std::vector<std::string> categories;     // categorical, code order
    std::int32_t arity = 1;
  };
  std::vector<ColumnCodec> codecs_;  // one per feature column, table order
  std::vector<std::string> class_labels_;
  std::string class_name_;

  friend struct EncoderAccess;
};

/// One-shot encoding of a table against its own cuts.
DiscreteDataset encode(const RawTable& table, const std::vector<CutList>& cuts);

/// Class codes of a table under first-appearance label coding.
std::vector<std::int32_t> class_codes_of(const RawTable& table);
/// Distinct class labels in first-appearance order.
std::vector<std::string> class_alphabet_of(const RawTable& table);

}  // namespace slfs

#endif  // SLFS_DATASET_HPP
