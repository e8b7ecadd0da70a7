#include "slfs/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "slfs/bn_classifier.hpp"
#include "slfs/discretizer.hpp"
#include "slfs/errors.hpp"
#include "slfs/reporting.hpp"
#include "slfs/rng.hpp"

namespace slfs {

namespace {

using json = nlohmann::json;

double log_or_ninf(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

}  // namespace

// ---------------------------------------------------------------------------
// Fold plan

std::vector<std::size_t> FoldPlan::test_rows(std::int32_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < assignment.size(); ++r)
    if (assignment[r] == fold) out.push_back(r);
  return out;
}

std::vector<std::size_t> FoldPlan::train_rows(std::int32_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < assignment.size(); ++r)
    if (assignment[r] != fold) out.push_back(r);
  return out;
}

FoldPlan make_fold_plan(std::span<const std::int32_t> class_codes, std::int32_t k,
                        std::uint64_t seed, bool stratified) {
  const std::size_t n = class_codes.size();
  if (k < 2) throw ConfigError("fold count must be >= 2");
  if (static_cast<std::size_t>(k) > n)
    throw ConfigError("fold count " + std::to_string(k) + " exceeds row count " +
                      std::to_string(n));

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.stratified = stratified;
  plan.assignment.assign(n, 0);

  std::mt19937_64 rng(seed);

  if (!stratified) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    deterministic_shuffle(rows, rng);
    for (std::size_t i = 0; i < n; ++i)
      plan.assignment[rows[i]] = static_cast<std::int32_t>(i % static_cast<std::size_t>(k));
    return plan;
  }

  // Group rows by class, shuffle within each group, then deal all groups
  // onto one continuing cyclic counter. Fold sizes differ by at most one
  // per class and at most one overall.
  std::int32_t n_classes = 0;
  for (auto c : class_codes) n_classes = std::max(n_classes, c + 1);
  std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(n_classes));
  for (std::size_t r = 0; r < n; ++r)
    groups[static_cast<std::size_t>(class_codes[r])].push_back(r);

  std::size_t pos = 0;
  for (auto& g : groups) {
    deterministic_shuffle(g, rng);
    for (auto r : g)
      plan.assignment[r] = static_cast<std::int32_t>(pos++ % static_cast<std::size_t>(k));
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Baseline selectors

std::vector<std::int32_t> mrmr_select(const DiscreteDataset& data, std::int32_t m) {
  const std::int32_t p = data.n_features();
  if (m < 1 || m > p)
    throw ConfigError("mrmr target count " + std::to_string(m) + " outside [1, " +
                      std::to_string(p) + "]");

  InfoEstimator est(data);
  std::vector<double> relevance(static_cast<std::size_t>(p));
  for (std::int32_t f = 0; f < p; ++f)
    relevance[static_cast<std::size_t>(f)] = est.mutual_info(f, kClassCol);

  std::vector<std::int32_t> picked;
  std::vector<bool> in(static_cast<std::size_t>(p), false);
  // Redundancy sums are maintained incrementally: after each pick, add
  // I(f; picked) to every remaining feature's accumulator.
  std::vector<double> redundancy(static_cast<std::size_t>(p), 0.0);

  for (std::int32_t round = 0; round < m; ++round) {
    std::int32_t best = -1;
    double best_score = 0.0;
    for (std::int32_t f = 0; f < p; ++f) {
      if (in[static_cast<std::size_t>(f)]) continue;
      const double red =
          picked.empty() ? 0.0
                         : redundancy[static_cast<std::size_t>(f)] /
                               static_cast<double>(picked.size());
      const double score = relevance[static_cast<std::size_t>(f)] - red;
      if (best == -1 || score > best_score) {
        best = f;
        best_score = score;
      }
    }
    picked.push_back(best);
    in[static_cast<std::size_t>(best)] = true;
    for (std::int32_t f = 0; f < p; ++f)
      if (!in[static_cast<std::size_t>(f)])
        redundancy[static_cast<std::size_t>(f)] += est.mutual_info(f, best);
  }
  return picked;
}

std::vector<Chi2Entry> chi2_rank(const DiscreteDataset& data) {
  std::vector<Chi2Entry> out;
  out.reserve(static_cast<std::size_t>(data.n_features()));
  for (std::int32_t f = 0; f < data.n_features(); ++f) {
    const auto t = ContingencyTable::from(data.features[static_cast<std::size_t>(f)],
                                          data.arities[static_cast<std::size_t>(f)],
                                          data.class_codes, data.n_classes);
    const std::int32_t na = t.dims[0], nb = t.dims[1];
    std::vector<std::int64_t> ra(na, 0), cb(nb, 0);
    for (std::int32_t a = 0; a < na; ++a)
      for (std::int32_t b = 0; b < nb; ++b) {
        ra[a] += t.at(a, b);
        cb[b] += t.at(a, b);
      }
    double stat = 0.0;
    for (std::int32_t a = 0; a < na; ++a)
      for (std::int32_t b = 0; b < nb; ++b) {
        const double e = static_cast<double>(ra[a]) * static_cast<double>(cb[b]) /
                         static_cast<double>(t.total);
        if (e > 0.0) {
          const double d = static_cast<double>(t.at(a, b)) - e;
          stat += d * d / e;
        }
      }
    out.push_back({f, stat});
  }
  std::sort(out.begin(), out.end(), [](const Chi2Entry& x, const Chi2Entry& y) {
    if (x.statistic != y.statistic) return x.statistic > y.statistic;
    return x.feature < y.feature;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Reference classifiers

std::int32_t knn_classify(std::span<const double> train, std::size_t width,
                          std::span<const std::int32_t> labels,
                          std::span<const double> test_row, std::int32_t k,
                          KnnMetric metric) {
  if (labels.empty()) throw DataError("knn: empty training slice");
  if (width == 0 || train.size() != labels.size() * width ||
      test_row.size() != width)
    throw DataError("knn: shape mismatch");

  const std::size_t n = labels.size();
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    double d = 0.0;
    const double* row = train.data() + r * width;
    if (metric == KnnMetric::HammingOnCodes) {
      for (std::size_t c = 0; c < width; ++c) d += row[c] != test_row[c] ? 1.0 : 0.0;
    } else {
      for (std::size_t c = 0; c < width; ++c) {
        const double x = row[c] - test_row[c];
        d += x * x;
      }
    }
    dist.emplace_back(d, r);
  }

  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk),
                    dist.end());  // pair order: distance, then row index

  std::int32_t n_classes = 0;
  for (auto l : labels) n_classes = std::max(n_classes, l + 1);
  std::vector<std::int32_t> votes(static_cast<std::size_t>(n_classes), 0);
  for (std::size_t i = 0; i < kk; ++i) ++votes[static_cast<std::size_t>(labels[dist[i].second])];

  std::int32_t winner = 0;
  for (std::int32_t c = 1; c < n_classes; ++c)
    if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(winner)])
      winner = c;
  return winner;
}

void NaiveBayes::fit(const DiscreteDataset& data, std::span<const std::int32_t> features,
                     double alpha) {
  if (data.n_rows() == 0) throw DataError("naive bayes: empty dataset");
  if (alpha < 0.0) throw ConfigError("naive bayes: alpha must be >= 0");

  features_.assign(features.begin(), features.end());
  n_classes_ = data.n_classes;
  const std::size_t n = data.n_rows();

  std::vector<std::int64_t> class_counts(static_cast<std::size_t>(n_classes_), 0);
  for (auto y : data.class_codes) ++class_counts[static_cast<std::size_t>(y)];

  log_prior_.clear();
  for (auto c : class_counts)
    log_prior_.push_back(log_or_ninf(
        (static_cast<double>(c) + alpha) /
        (static_cast<double>(n) + alpha * static_cast<double>(n_classes_))));

  arities_.clear();
  log_cond_.clear();
  log_floor_.clear();
  for (auto f : features_) {
    const std::int32_t arity = data.arities[static_cast<std::size_t>(f)];
    arities_.push_back(arity);
    const auto& col = data.features[static_cast<std::size_t>(f)];
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n_classes_) * arity, 0);
    for (std::size_t r = 0; r < n; ++r)
      ++counts[static_cast<std::size_t>(data.class_codes[r]) * arity + col[r]];

    std::vector<double> logs(counts.size());
    std::vector<double> floor(static_cast<std::size_t>(n_classes_));
    for (std::int32_t y = 0; y < n_classes_; ++y) {
      const double denom = static_cast<double>(class_counts[static_cast<std::size_t>(y)]) +
                           alpha * static_cast<double>(arity);
      for (std::int32_t v = 0; v < arity; ++v) {
        const auto idx = static_cast<std::size_t>(y) * arity + v;
        logs[idx] = denom > 0.0
                        ? log_or_ninf((static_cast<double>(counts[idx]) + alpha) / denom)
                        : log_or_ninf(1.0 / static_cast<double>(arity));
      }
      floor[static_cast<std::size_t>(y)] =
          denom > 0.0 ? log_or_ninf(alpha / denom) : log_or_ninf(1.0 / static_cast<double>(arity));
    }
    log_cond_.push_back(std::move(logs));
    log_floor_.push_back(std::move(floor));
  }
}

std::int32_t NaiveBayes::predict(std::span<const std::int32_t> row) const {
  std::vector<double> score(log_prior_);
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto f = static_cast<std::size_t>(features_[i]);
    if (f >= row.size())
      throw SchemaError("naive bayes: row lacks feature " + std::to_string(features_[i]));
    const std::int32_t code = row[f];
    const bool in_range = code >= 0 && code < arities_[i];
    for (std::int32_t y = 0; y < n_classes_; ++y)
      score[static_cast<std::size_t>(y)] +=
          in_range ? log_cond_[i][static_cast<std::size_t>(y) * arities_[i] + code]
                   : log_floor_[i][static_cast<std::size_t>(y)];
  }
  std::int32_t best = 0;
  for (std::int32_t y = 1; y < n_classes_; ++y)
    if (score[static_cast<std::size_t>(y)] > score[static_cast<std::size_t>(best)]) best = y;
  return best;
}

double NaiveBayes::accuracy(const DiscreteDataset& data) const {
  if (data.n_rows() == 0) throw DataError("naive bayes: empty dataset");
  std::vector<std::int32_t> row(static_cast<std::size_t>(data.n_features()), 0);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    for (std::size_t f = 0; f < row.size(); ++f) row[f] = data.features[f][r];
    if (predict(row) == data.class_codes[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.n_rows());
}

// ---------------------------------------------------------------------------
// Cross-validation

std::string SelectorConfig::name() const {
  switch (kind) {
    case Kind::Slfs: return "slfs";
    case Kind::Mrmr: return "mrmr";
    case Kind::Chi2: return "chi2";
    case Kind::None: return "none";
  }
  return "unknown";
}

std::string ClassifierConfig::name() const {
  switch (kind) {
    case Kind::Knn: return "knn" + std::to_string(k);
    case Kind::NaiveBayes: return "nb";
    case Kind::Bnslfs: return "bnslfs";
    case Kind::Majority: return "majority";
  }
  return "unknown";
}

namespace {

struct FoldOutcome {
  double accuracy = 0.0;
  std::int32_t selected_count = 0;
  std::vector<std::string> warnings;
};

// KNN rows over the selected features: raw numeric values under the
// Euclidean metric, category codes otherwise (and always for categorical
// columns, which have no raw magnitude).
std::vector<double> knn_matrix(const RawTable& table, const DiscreteDataset& ds,
                               std::span<const std::int32_t> selected, KnnMetric metric) {
  const auto feat_cols = table.feature_columns();
  std::vector<double> out;
  out.reserve(table.n_rows * selected.size());
  for (std::size_t r = 0; r < table.n_rows; ++r) {
    for (auto f : selected) {
      const Column& col = table.columns[feat_cols[static_cast<std::size_t>(f)]];
      if (metric == KnnMetric::EuclideanOnRaw && col.kind == ColumnKind::Numeric)
        out.push_back(col.numeric[r]);
      else
        out.push_back(static_cast<double>(ds.features[static_cast<std::size_t>(f)][r]));
    }
  }
  return out;
}

FoldOutcome run_fold(const RawTable& table, const std::vector<std::string>& alphabet,
                     const SelectorConfig& selector, const ClassifierConfig& classifier,
                     const FoldPlan& plan, std::int32_t fold) {
  FoldOutcome out;
  const auto train_idx = plan.train_rows(fold);
  const auto test_idx = plan.test_rows(fold);
  if (test_idx.empty()) throw ConfigError("fold " + std::to_string(fold) + " is empty");

  const RawTable train = table.select_rows(train_idx);
  const RawTable test = table.select_rows(test_idx);

  // Fit everything on the training rows only. The class alphabet comes from
  // the full table so fold models agree on label codes; that is label
  // metadata, not leakage.
  const auto train_codes = [&] {
    std::unordered_map<std::string, std::int32_t> index;
    for (std::size_t i = 0; i < alphabet.size(); ++i)
      index.emplace(alphabet[i], static_cast<std::int32_t>(i));
    std::vector<std::int32_t> codes;
    codes.reserve(train.n_rows);
    for (const auto& s : train.class_col().categorical) codes.push_back(index.at(s));
    return codes;
  }();

  {
    std::vector<bool> present(alphabet.size(), false);
    for (auto c : train_codes) present[static_cast<std::size_t>(c)] = true;
    for (std::size_t c = 0; c < present.size(); ++c)
      if (!present[c])
        out.warnings.push_back("fold " + std::to_string(fold) + ": class \"" +
                               alphabet[c] + "\" absent from training rows");
  }

  const auto cuts = discretize_all(train, train_codes);
  const Encoder enc = Encoder::fit(train, cuts, &alphabet);
  const DiscreteDataset train_ds = enc.apply(train);
  const DiscreteDataset test_ds = enc.apply(test);

  // Selection.
  std::vector<std::int32_t> selected;
  SelectionResult slfs_result{Tbn(1, 1)};
  bool have_tree = false;

  const auto slfs_count = [&]() -> std::int32_t {
    SelectionResult r = run_slfs(train_ds, selector.slfs);
    return static_cast<std::int32_t>(r.selected.size());
  };

  switch (selector.kind) {
    case SelectorConfig::Kind::Slfs: {
      slfs_result = run_slfs(train_ds, selector.slfs);
      selected = slfs_result.selected;
      have_tree = true;
      for (const auto& w : slfs_result.warnings)
        out.warnings.push_back("fold " + std::to_string(fold) + ": " + w);
      break;
    }
    case SelectorConfig::Kind::Mrmr: {
      std::int32_t m = selector.m > 0 ? selector.m : std::max(1, slfs_count());
      m = std::min(m, train_ds.n_features());
      selected = mrmr_select(train_ds, m);
      std::sort(selected.begin(), selected.end());
      break;
    }
    case SelectorConfig::Kind::Chi2: {
      std::int32_t m = selector.m > 0 ? selector.m : std::max(1, slfs_count());
      m = std::min(m, train_ds.n_features());
      const auto ranked = chi2_rank(train_ds);
      for (std::int32_t i = 0; i < m; ++i) selected.push_back(ranked[static_cast<std::size_t>(i)].feature);
      std::sort(selected.begin(), selected.end());
      break;
    }
    case SelectorConfig::Kind::None: {
      selected.resize(static_cast<std::size_t>(train_ds.n_features()));
      std::iota(selected.begin(), selected.end(), 0);
      break;
    }
  }
  out.selected_count = static_cast<std::int32_t>(selected.size());

  // Classification on the held-out rows.
  const std::size_t n_test = test_ds.n_rows();
  switch (classifier.kind) {
    case ClassifierConfig::Kind::Majority: {
      std::vector<std::int64_t> counts(alphabet.size(), 0);
      for (auto y : train_ds.class_codes) ++counts[static_cast<std::size_t>(y)];
      std::int32_t majority = 0;
      for (std::size_t c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[static_cast<std::size_t>(majority)])
          majority = static_cast<std::int32_t>(c);
      std::size_t correct = 0;
      for (auto y : test_ds.class_codes)
        if (y == majority) ++correct;
      out.accuracy = static_cast<double>(correct) / static_cast<double>(n_test);
      break;
    }
    case ClassifierConfig::Kind::NaiveBayes: {
      NaiveBayes nb;
      nb.fit(train_ds, selected, classifier.alpha);
      out.accuracy = nb.accuracy(test_ds);
      break;
    }
    case ClassifierConfig::Kind::Bnslfs: {
      if (!have_tree)
        throw ConfigError("bnslfs classifier requires the slfs selector");
      const CptModel model = fit_cpts(slfs_result.tbn, train_ds, classifier.alpha);
      out.accuracy = evaluate_accuracy(model, test_ds);
      break;
    }
    case ClassifierConfig::Kind::Knn: {
      if (selected.empty()) throw ConfigError("knn: no features selected");
      KnnMetric metric;
      if (classifier.metric.has_value()) {
        metric = *classifier.metric;
      } else {
        const auto feat_cols = table.feature_columns();
        bool all_categorical = true;
        for (auto f : selected)
          if (table.columns[feat_cols[static_cast<std::size_t>(f)]].kind ==
              ColumnKind::Numeric)
            all_categorical = false;
        metric = all_categorical ? KnnMetric::HammingOnCodes : KnnMetric::EuclideanOnRaw;
      }
      const auto train_m = knn_matrix(train, train_ds, selected, metric);
      const auto test_m = knn_matrix(test, test_ds, selected, metric);
      const std::size_t width = selected.size();
      std::size_t correct = 0;
      for (std::size_t r = 0; r < n_test; ++r) {
        const std::span<const double> row(test_m.data() + r * width, width);
        if (knn_classify(train_m, width, train_ds.class_codes, row, classifier.k,
                         metric) == test_ds.class_codes[r])
          ++correct;
      }
      out.accuracy = static_cast<double>(correct) / static_cast<double>(n_test);
      break;
    }
  }
  return out;
}

}  // namespace

CvResult cross_validate(const RawTable& table, const SelectorConfig& selector,
                        const ClassifierConfig& classifier, const FoldPlan& plan,
                        int jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  if (plan.assignment.size() != table.n_rows)
    throw ConfigError("fold plan does not cover the table rows");

  const auto alphabet = class_alphabet_of(table);
  const std::int32_t k = plan.k;

  std::vector<FoldOutcome> outcomes(static_cast<std::size_t>(k));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(k));

  if (jobs <= 1) {
    for (std::int32_t f = 0; f < k; ++f)
      outcomes[static_cast<std::size_t>(f)] =
          run_fold(table, alphabet, selector, classifier, plan, f);
  } else {
    std::atomic<std::int32_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::int32_t f = next.fetch_add(1);
        if (f >= k) return;
        try {
          outcomes[static_cast<std::size_t>(f)] =
              run_fold(table, alphabet, selector, classifier, plan, f);
        } catch (...) {
          errors[static_cast<std::size_t>(f)] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(jobs, k);
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);  // first fold's failure, deterministic
  }

  CvResult res;
  for (auto& o : outcomes) {
    res.fold_accuracies.push_back(o.accuracy);
    res.fold_selected_counts.push_back(o.selected_count);
    for (auto& w : o.warnings) res.warnings.push_back(std::move(w));
  }
  double sum = 0.0;
  for (auto a : res.fold_accuracies) sum += a;
  res.mean_accuracy = sum / static_cast<double>(k);
  if (k > 1) {
    double ss = 0.0;
    for (auto a : res.fold_accuracies) {
      const double d = a - res.mean_accuracy;
      ss += d * d;
    }
    res.std_accuracy = std::sqrt(ss / static_cast<double>(k - 1));
  }
  res.wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// ---------------------------------------------------------------------------
// Benchmark report

std::string BenchmarkReport::to_csv() const {
  std::ostringstream os;
  os << "dataset,selector,classifier,fold,accuracy,selected_count\n";
  for (const auto& r : rows) {
    os << csv_escape(r.dataset) << ',' << csv_escape(r.selector) << ','
       << csv_escape(r.classifier) << ',' << r.fold << ','
       << format_double(r.accuracy) << ',' << r.selected_count << '\n';
  }
  return os.str();
}

std::string BenchmarkReport::to_json_string() const {
  json jrows = json::array();
  for (const auto& r : rows) {
    jrows.push_back({{"dataset", r.dataset},
                     {"selector", r.selector},
                     {"classifier", r.classifier},
                     {"fold", r.fold},
                     {"accuracy", r.accuracy},
                     {"selected_count", r.selected_count}});
  }

  // Aggregates keyed by (dataset, selector, classifier), in row order.
  json aggs = json::array();
  std::vector<std::string> seen;
  for (const auto& r : rows) {
    const std::string key = r.dataset + "\x1f" + r.selector + "\x1f" + r.classifier;
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    std::vector<double> accs;
    double count_sum = 0.0;
    for (const auto& q : rows)
      if (q.dataset == r.dataset && q.selector == r.selector &&
          q.classifier == r.classifier) {
        accs.push_back(q.accuracy);
        count_sum += q.selected_count;
      }
    double mean = 0.0;
    for (auto a : accs) mean += a;
    mean /= static_cast<double>(accs.size());
    double sd = 0.0;
    if (accs.size() > 1) {
      for (auto a : accs) sd += (a - mean) * (a - mean);
      sd = std::sqrt(sd / static_cast<double>(accs.size() - 1));
    }
    aggs.push_back({{"dataset", r.dataset},
                    {"selector", r.selector},
                    {"classifier", r.classifier},
                    {"mean_accuracy", mean},
                    {"std_accuracy", sd},
                    {"mean_selected", count_sum / static_cast<double>(accs.size())}});
  }

  json j;
  j["rows"] = std::move(jrows);
  j["aggregates"] = std::move(aggs);
  return j.dump(2);
}

}  // namespace slfs
