#include "slfs/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "slfs/errors.hpp"

namespace slfs {

namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

// Splits one CSV record. Fields may be double-quoted; "" inside quotes is a
// literal quote. Unquoted fields are trimmed.
std::vector<std::string> split_record(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (true) {
    std::string field;
    // skip leading spaces before a possible quote
    std::size_t j = i;
    while (j < n && (line[j] == ' ' || line[j] == '\t')) ++j;
    if (j < n && line[j] == '"') {
      ++j;
      while (j < n) {
        if (line[j] == '"') {
          if (j + 1 < n && line[j + 1] == '"') {
            field.push_back('"');
            j += 2;
          } else {
            ++j;
            break;
          }
        } else {
          field.push_back(line[j]);
          ++j;
        }
      }
      while (j < n && line[j] != delim) ++j;  // tolerate trailing spaces
      fields.push_back(std::move(field));
      i = j;
    } else {
      std::size_t k = line.find(delim, i);
      if (k == std::string::npos) k = n;
      fields.emplace_back(trim(std::string_view(line).substr(i, k - i)));
      i = k;
    }
    if (i >= n) break;
    ++i;  // consume delimiter
  }
  return fields;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

bool Column::any_missing() const {
  return std::find(missing.begin(), missing.end(), std::uint8_t{1}) != missing.end();
}

std::vector<std::size_t> RawTable::feature_columns() const {
  std::vector<std::size_t> idx;
  idx.reserve(columns.size() - 1);
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (i != class_column) idx.push_back(i);
  return idx;
}

RawTable RawTable::select_rows(std::span<const std::size_t> rows) const {
  RawTable out;
  out.class_column = class_column;
  out.n_rows = rows.size();
  out.columns.reserve(columns.size());
  for (const auto& c : columns) {
    Column nc;
    nc.name = c.name;
    nc.kind = c.kind;
    nc.missing.reserve(rows.size());
    if (c.kind == ColumnKind::Numeric) {
      nc.numeric.reserve(rows.size());
      for (auto r : rows) nc.numeric.push_back(c.numeric[r]);
    } else {
      nc.categorical.reserve(rows.size());
      for (auto r : rows) nc.categorical.push_back(c.categorical[r]);
    }
    for (auto r : rows) nc.missing.push_back(c.missing[r]);
    out.columns.push_back(std::move(nc));
  }
  return out;
}

RawTable load_csv(const std::string& path, const std::string& class_column,
                  const SchemaHints& hints, const CsvOptions& opts) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw DataError("empty file: " + path);

  const auto header = split_record(lines[0], opts.delimiter);
  const std::size_t n_cols = header.size();
  if (n_cols == 0) throw DataError("empty header row: " + path);

  // Resolve the class column: by name, then by all-digit 0-based index.
  std::size_t class_idx = n_cols;
  for (std::size_t i = 0; i < n_cols; ++i)
    if (header[i] == class_column) {
      class_idx = i;
      break;
    }
  if (class_idx == n_cols && !class_column.empty() &&
      std::all_of(class_column.begin(), class_column.end(),
                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    const std::size_t k = static_cast<std::size_t>(std::stoull(class_column));
    if (k < n_cols) class_idx = k;
  }
  if (class_idx == n_cols)
    throw DataError("class column not found: \"" + class_column + "\"");

  // Collect cells row-major, checking for ragged records. Blank lines at the
  // end of the file are tolerated.
  std::vector<std::vector<std::string>> cells;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) {
      bool rest_blank = true;
      for (std::size_t lj = li; lj < lines.size(); ++lj)
        if (!lines[lj].empty()) rest_blank = false;
      if (rest_blank) break;
    }
    auto fields = split_record(lines[li], opts.delimiter);
    if (fields.size() != n_cols)
      throw DataError("ragged row " + std::to_string(li + 1) + ": expected " +
                      std::to_string(n_cols) + " fields, got " + std::to_string(fields.size()));
    cells.push_back(std::move(fields));
  }
  const std::size_t n_rows = cells.size();
  if (n_rows == 0) throw DataError("no data rows: " + path);

  RawTable table;
  table.class_column = class_idx;
  table.n_rows = n_rows;
  table.columns.resize(n_cols);

  for (std::size_t c = 0; c < n_cols; ++c) {
    Column& col = table.columns[c];
    col.name = header[c];
    col.missing.assign(n_rows, 0);

    auto is_missing_cell = [&](const std::string& cell) {
      return cell.empty() || cell == opts.missing_marker;
    };

    // The class column is always categorical. Otherwise honor hints, else
    // infer numeric when every non-missing cell parses and at least one does.
    bool numeric;
    if (c == class_idx) {
      numeric = false;
    } else if (auto it = hints.find(col.name); it != hints.end()) {
      numeric = it->second == ColumnKind::Numeric;
    } else {
      numeric = false;
      bool all_parse = true;
      bool any_value = false;
      double tmp;
      for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& cell = cells[r][c];
        if (is_missing_cell(cell)) continue;
        any_value = true;
        if (!parse_double(cell, tmp)) {
          all_parse = false;
          break;
        }
      }
      numeric = any_value && all_parse;
    }

    if (numeric) {
      col.kind = ColumnKind::Numeric;
      col.numeric.assign(n_rows, std::numeric_limits<double>::quiet_NaN());
      for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& cell = cells[r][c];
        double v;
        if (is_missing_cell(cell) || !parse_double(cell, v))
          col.missing[r] = 1;
        else
          col.numeric[r] = v;
      }
    } else {
      col.kind = ColumnKind::Categorical;
      col.categorical.resize(n_rows);
      for (std::size_t r = 0; r < n_rows; ++r) {
        col.categorical[r] = cells[r][c];
        if (is_missing_cell(cells[r][c])) col.missing[r] = 1;
      }
    }
  }
  return table;
}

RawTable handle_missing(const RawTable& table, MissingPolicy policy) {
  if (policy == MissingPolicy::DropRows) {
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < table.n_rows; ++r) {
      bool ok = true;
      for (const auto& c : table.columns)
        if (c.missing[r]) {
          ok = false;
          break;
        }
      if (ok) keep.push_back(r);
    }
    if (keep.empty()) throw DataError("no rows remain after dropping missing values");
    return table.select_rows(keep);
  }

  // Impute: numeric cells get the column median of the observed values;
  // categorical cells keep their marker text, which becomes its own category
  // at encode time.
  RawTable out = table;
  for (auto& c : out.columns) {
    if (!c.any_missing()) {
      continue;
    }
    if (c.kind == ColumnKind::Numeric) {
      std::vector<double> seen;
      for (std::size_t r = 0; r < out.n_rows; ++r)
        if (!c.missing[r]) seen.push_back(c.numeric[r]);
      const double med = median_of(std::move(seen));
      for (std::size_t r = 0; r < out.n_rows; ++r)
        if (c.missing[r]) c.numeric[r] = med;
    }
    std::fill(c.missing.begin(), c.missing.end(), std::uint8_t{0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Encoder

namespace {

// Raw bin of a value: number of cuts <= v. NaN compares false against every
// cut and lands in bin 0.
std::int32_t raw_bin(double v, const std::vector<double>& cuts) {
  std::int32_t b = 0;
  for (double c : cuts)
    if (c <= v) ++b;
  return b;
}

}  // namespace

Encoder Encoder::fit(const RawTable& table, const std::vector<CutList>& cuts,
                     const std::vector<std::string>* class_alphabet) {
  Encoder enc;
  enc.class_name_ = table.class_col().name;

  if (class_alphabet != nullptr) {
    enc.class_labels_ = *class_alphabet;
  } else {
    enc.class_labels_ = class_alphabet_of(table);
  }
  if (enc.class_labels_.size() < 2)
    throw DataError("need at least 2 distinct class labels, found " +
                    std::to_string(enc.class_labels_.size()));

  // Cut lists are keyed by table column index.
  std::unordered_map<std::int32_t, const std::vector<double>*> cut_by_col;
  for (const auto& cl : cuts) cut_by_col.emplace(cl.column, &cl.cuts);

  for (std::size_t ci : table.feature_columns()) {
    const Column& col = table.columns[ci];
    ColumnCodec codec;
    codec.name = col.name;
    codec.kind = col.kind;

    if (col.kind == ColumnKind::Numeric) {
      if (auto it = cut_by_col.find(static_cast<std::int32_t>(ci)); it != cut_by_col.end())
        codec.cuts = *it->second;

      // Squeeze out bins no fit-row lands in, so codes stay dense. Bins that
      // appear only later clamp to the nearest kept bin, ties toward the
      // lower one.
      const std::int32_t n_bins = static_cast<std::int32_t>(codec.cuts.size()) + 1;
      std::vector<std::uint8_t> seen(static_cast<std::size_t>(n_bins), 0);
      for (double v : col.numeric) seen[static_cast<std::size_t>(raw_bin(v, codec.cuts))] = 1;

      std::vector<std::int32_t> kept;
      for (std::int32_t b = 0; b < n_bins; ++b)
        if (seen[static_cast<std::size_t>(b)]) kept.push_back(b);
      if (kept.empty()) kept.push_back(0);  // cannot happen with n_rows > 0

      codec.bin_to_code.assign(static_cast<std::size_t>(n_bins), 0);
      for (std::int32_t b = 0; b < n_bins; ++b) {
        std::int32_t best = 0;
        std::int32_t best_dist = std::numeric_limits<std::int32_t>::max();
        for (std::size_t k = 0; k < kept.size(); ++k) {
          const std::int32_t d = std::abs(kept[k] - b);
          if (d < best_dist) {  // ties keep the earlier (lower) bin
            best_dist = d;
            best = static_cast<std::int32_t>(k);
          }
        }
        codec.bin_to_code[static_cast<std::size_t>(b)] = best;
      }
      codec.arity = static_cast<std::int32_t>(kept.size());
    } else {
      std::unordered_map<std::string, std::int32_t> index;
      for (const auto& s : col.categorical) {
        if (index.emplace(s, static_cast<std::int32_t>(codec.categories.size())).second)
          codec.categories.push_back(s);
      }
      codec.arity = static_cast<std::int32_t>(codec.categories.size());
      if (codec.arity == 0) codec.arity = 1;
    }
    enc.codecs_.push_back(std::move(codec));
  }
  return enc;
}

DiscreteDataset Encoder::apply(const RawTable& table) const {
  if (table.class_col().name != class_name_)
    throw SchemaError("class column mismatch: encoder was fit for \"" + class_name_ +
                      "\", table has \"" + table.class_col().name + "\"");

  std::unordered_map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    by_name.emplace(table.columns[i].name, i);

  DiscreteDataset ds;
  ds.features.reserve(codecs_.size());
  ds.arities.reserve(codecs_.size());
  ds.feature_names.reserve(codecs_.size());

  for (const auto& codec : codecs_) {
    auto it = by_name.find(codec.name);
    if (it == by_name.end())
      throw SchemaError("column \"" + codec.name + "\" not present in table");
    const Column& col = table.columns[it->second];
    if (col.kind != codec.kind)
      throw SchemaError("column \"" + codec.name + "\" changed type since fit");

    std::vector<std::int32_t> codes;
    codes.reserve(table.n_rows);
    if (codec.kind == ColumnKind::Numeric) {
      for (double v : col.numeric)
        codes.push_back(codec.bin_to_code[static_cast<std::size_t>(raw_bin(v, codec.cuts))]);
    } else {
      std::unordered_map<std::string, std::int32_t> index;
      for (std::size_t k = 0; k < codec.categories.size(); ++k)
        index.emplace(codec.categories[k], static_cast<std::int32_t>(k));
      for (const auto& s : col.categorical) {
        auto f = index.find(s);
        codes.push_back(f == index.end() ? 0 : f->second);  // unseen -> 0
      }
    }
    ds.features.push_back(std::move(codes));
    ds.arities.push_back(codec.arity);
    ds.feature_names.push_back(codec.name);
  }

  std::unordered_map<std::string, std::int32_t> cindex;
  for (std::size_t k = 0; k < class_labels_.size(); ++k)
    cindex.emplace(class_labels_[k], static_cast<std::int32_t>(k));
  ds.class_codes.reserve(table.n_rows);
  for (const auto& s : table.class_col().categorical) {
    auto f = cindex.find(s);
    if (f == cindex.end()) throw DataError("unknown class label: \"" + s + "\"");
    ds.class_codes.push_back(f->second);
  }
  ds.n_classes = static_cast<std::int32_t>(class_labels_.size());
  return ds;
}

std::string Encoder::to_json_string() const {
  json j;
  j["class"] = {{"name", class_name_}, {"labels", class_labels_}};
  json cols = json::array();
  for (const auto& c : codecs_) {
    json jc;
    jc["name"] = c.name;
    jc["kind"] = c.kind == ColumnKind::Numeric ? "numeric" : "categorical";
    if (c.kind == ColumnKind::Numeric) {
      jc["cuts"] = c.cuts;
      jc["bin_to_code"] = c.bin_to_code;
    } else {
      jc["categories"] = c.categories;
    }
    jc["arity"] = c.arity;
    cols.push_back(std::move(jc));
  }
  j["columns"] = std::move(cols);
  return j.dump(2);
}

Encoder Encoder::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("encoder json parse error: ") + e.what());
  }
  try {
    Encoder enc;
    enc.class_name_ = j.at("class").at("name").get<std::string>();
    enc.class_labels_ = j.at("class").at("labels").get<std::vector<std::string>>();
    for (const auto& jc : j.at("columns")) {
      ColumnCodec c;
      c.name = jc.at("name").get<std::string>();
      const auto kind = jc.at("kind").get<std::string>();
      if (kind == "numeric") {
        c.kind = ColumnKind::Numeric;
        c.cuts = jc.at("cuts").get<std::vector<double>>();
        c.bin_to_code = jc.at("bin_to_code").get<std::vector<std::int32_t>>();
      } else if (kind == "categorical") {
        c.kind = ColumnKind::Categorical;
        c.categories = jc.at("categories").get<std::vector<std::string>>();
      } else {
        throw SchemaError("encoder json: unknown column kind \"" + kind + "\"");
      }
      c.arity = jc.at("arity").get<std::int32_t>();
      enc.codecs_.push_back(std::move(c));
    }
    return enc;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("encoder json missing field: ") + e.what());
  }
}

DiscreteDataset encode(const RawTable& table, const std::vector<CutList>& cuts) {
  return Encoder::fit(table, cuts).apply(table);
}

std::vector<std::int32_t> class_codes_of(const RawTable& table) {
  const auto alphabet = class_alphabet_of(table);
  std::unordered_map<std::string, std::int32_t> index;
  for (std::size_t k = 0; k < alphabet.size(); ++k)
    index.emplace(alphabet[k], static_cast<std::int32_t>(k));
  std::vector<std::int32_t> codes;
  codes.reserve(table.n_rows);
  for (const auto& s : table.class_col().categorical) codes.push_back(index.at(s));
  return codes;
}

std::vector<std::string> class_alphabet_of(const RawTable& table) {
  std::vector<std::string> alphabet;
  std::unordered_map<std::string, std::int32_t> index;
  for (const auto& s : table.class_col().categorical)
    if (index.emplace(s, static_cast<std::int32_t>(alphabet.size())).second)
      alphabet.push_back(s);
  return alphabet;
}

}  // namespace slfs
