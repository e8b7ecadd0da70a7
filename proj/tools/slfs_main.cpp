// Command line driver: discretize, select, train, predict, benchmark,
// export-dot, rerun. Every command resolves its options (config file first,
// flags override), runs the pipeline, writes its outputs atomically into
// --out-dir and records a manifest sufficient to repeat the run.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "slfs/bn_classifier.hpp"
#include "slfs/dataset.hpp"
#include "slfs/discretizer.hpp"
#include "slfs/engine.hpp"
#include "slfs/errors.hpp"
#include "slfs/evaluation.hpp"
#include "slfs/reporting.hpp"
#include "slfs/tbn.hpp"

namespace {

using json = nlohmann::json;
using namespace slfs;

constexpr int kExitOk = 0;
constexpr int kExitBadArgs = 2;
constexpr int kExitDataError = 3;
constexpr int kExitSchemaError = 4;

struct CommonOpts {
  std::string data;
  std::string class_column;
  std::string out_dir = ".";
  std::string missing_policy = "impute";
  std::string delimiter = ",";
  std::string missing_marker = "?";
  std::string categorical;  // comma list of columns to load as categories
};

struct EngineOpts {
  double lambda = 1.0;
  std::int32_t max_depth = 2;
  std::int32_t nch = 15;
  double epsilon = 0.01;
  std::string irrelevance_mode = "mi-zero";
  std::string order = "column";
};

struct BenchOpts {
  std::int32_t folds = 10;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string selectors = "slfs";
  std::string classifiers = "bnslfs";
  std::string dataset_name;
};

struct TrainOpts {
  double alpha = 1.0;
  std::string cpt_mode = "tree";
};

// Values from a JSON config file become the defaults; flags override.
void apply_config_file(const std::string& path, CommonOpts& c, EngineOpts& e,
                       BenchOpts& b, TrainOpts& t) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& ex) {
    throw ConfigError("config file " + path + ": " + ex.what());
  }
  auto get = [&](const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
  };
  get("data", c.data);
  get("class", c.class_column);
  get("out_dir", c.out_dir);
  get("missing_policy", c.missing_policy);
  get("delimiter", c.delimiter);
  get("missing_marker", c.missing_marker);
  get("categorical", c.categorical);
  get("lambda", e.lambda);
  get("max_depth", e.max_depth);
  get("nch", e.nch);
  get("epsilon", e.epsilon);
  get("irrelevance_mode", e.irrelevance_mode);
  get("order", e.order);
  get("folds", b.folds);
  get("seed", b.seed);
  get("jobs", b.jobs);
  get("selectors", b.selectors);
  get("classifiers", b.classifiers);
  get("dataset_name", b.dataset_name);
  get("alpha", t.alpha);
  get("cpt_mode", t.cpt_mode);
}

SlfsConfig make_engine_config(const EngineOpts& e) {
  SlfsConfig cfg;
  cfg.lambda = e.lambda;
  cfg.max_depth = e.max_depth;
  cfg.nch = e.nch;
  cfg.epsilon = e.epsilon;
  if (e.irrelevance_mode == "mi-zero") {
    cfg.irrelevance_mode = IrrelevanceMode::MiZero;
  } else if (e.irrelevance_mode == "criterion-deltas") {
    cfg.irrelevance_mode = IrrelevanceMode::CriterionDeltas;
  } else {
    throw ConfigError("unknown --irrelevance-mode \"" + e.irrelevance_mode +
                      "\" (expected mi-zero or criterion-deltas)");
  }
  if (e.order == "column") {
    cfg.arrival_order = ArrivalOrder::ColumnOrder;
  } else if (e.order.rfind("shuffle:", 0) == 0) {
    cfg.arrival_order = ArrivalOrder::Shuffled;
    try {
      cfg.shuffle_seed = std::stoull(e.order.substr(8));
    } catch (const std::exception&) {
      throw ConfigError("bad --order \"" + e.order + "\" (expected shuffle:SEED)");
    }
  } else {
    throw ConfigError("unknown --order \"" + e.order +
                      "\" (expected column or shuffle:SEED)");
  }
  cfg.validate();
  return cfg;
}

MissingPolicy parse_missing_policy(const std::string& s) {
  if (s == "impute") return MissingPolicy::Impute;
  if (s == "drop-rows") return MissingPolicy::DropRows;
  throw ConfigError("unknown --missing-policy \"" + s +
                    "\" (expected impute or drop-rows)");
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i <= csv.size()) {
    const std::size_t j = std::min(csv.find(',', i), csv.size());
    if (j > i) out.push_back(csv.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

RawTable load_table(const CommonOpts& c) {
  if (c.data.empty()) throw ConfigError("--data is required");
  if (c.class_column.empty()) throw ConfigError("--class is required");
  CsvOptions opts;
  if (c.delimiter.size() != 1)
    throw ConfigError("--delimiter must be a single character");
  opts.delimiter = c.delimiter[0];
  opts.missing_marker = c.missing_marker;
  SchemaHints hints;
  for (const auto& name : split_list(c.categorical))
    hints[name] = ColumnKind::Categorical;
  RawTable t = load_csv(c.data, c.class_column, hints, opts);
  return handle_missing(t, parse_missing_policy(c.missing_policy));
}

json common_json(const CommonOpts& c) {
  return json{{"data", c.data},
              {"class", c.class_column},
              {"out_dir", c.out_dir},
              {"missing_policy", c.missing_policy},
              {"delimiter", c.delimiter},
              {"missing_marker", c.missing_marker},
              {"categorical", c.categorical}};
}

json engine_json(const EngineOpts& e) {
  return json{{"lambda", e.lambda},
              {"max_depth", e.max_depth},
              {"nch", e.nch},
              {"epsilon", e.epsilon},
              {"irrelevance_mode", e.irrelevance_mode},
              {"order", e.order}};
}

void write_manifest(const CommonOpts& c, const std::string& command,
                    const json& config, std::uint64_t seed,
                    std::vector<std::string> outputs,
                    std::map<std::string, double> timings) {
  RunManifest m;
  m.command = command;
  m.config_json = config.dump();
  m.data_path = c.data;
  m.data_checksum = c.data.empty() ? "" : file_checksum(c.data);
  m.seed = seed;
  m.outputs = std::move(outputs);
  m.timings_s = std::move(timings);
  const auto path = std::filesystem::path(c.out_dir) / "manifest.json";
  atomic_write_file(path.string(), m.to_json_string() + "\n");
}

void write_out(const CommonOpts& c, const std::string& name, const std::string& text) {
  const auto path = std::filesystem::path(c.out_dir) / name;
  atomic_write_file(path.string(), text);
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns the outputs it wrote (for the manifest).

void cmd_discretize(const CommonOpts& c) {
  const RawTable table = load_table(c);
  const auto codes = class_codes_of(table);
  const auto cuts = discretize_all(table, codes);

  json jcols = json::array();
  for (const auto& cl : cuts) {
    jcols.push_back({{"column", cl.column},
                     {"name", table.columns[static_cast<std::size_t>(cl.column)].name},
                     {"cuts", cl.cuts}});
  }
  json doc;
  doc["columns"] = std::move(jcols);
  write_out(c, "cuts.json", doc.dump(2) + "\n");
  write_manifest(c, "discretize", common_json(c), 0, {"cuts.json"}, {});
  std::cout << "wrote cuts for " << cuts.size() << " numeric columns\n";
}

json selection_to_json(const SelectionResult& res, const DiscreteDataset& ds) {
  auto name_of = [&](std::int32_t f) -> std::string {
    if (f == Tbn::kClassNode) return "Y";
    return ds.feature_names[static_cast<std::size_t>(f)];
  };
  json sel = json::array();
  for (auto f : res.selected) {
    sel.push_back({{"id", f},
                   {"name", name_of(f)},
                   {"depth", res.tbn.depth_of(f)},
                   {"parent", res.tbn.parent_of(f)},
                   {"parent_name", name_of(res.tbn.parent_of(f))}});
  }
  json rej = json::array();
  for (const auto& r : res.rejected) {
    json blanket = json::array();
    for (auto b : r.markov_blanket) blanket.push_back({{"id", b}, {"name", name_of(b)}});
    rej.push_back({{"id", r.feature},
                   {"name", name_of(r.feature)},
                   {"reason", to_string(r.reason)},
                   {"markov_blanket", std::move(blanket)}});
  }
  json doc;
  doc["selected"] = std::move(sel);
  doc["rejected"] = std::move(rej);
  doc["swap_count"] = res.swap_count;
  doc["j_final"] = res.j_trace.empty() ? 0.0 : res.j_trace.back();
  doc["warnings"] = res.warnings;
  return doc;
}

std::string j_trace_csv(const SelectionResult& res, const DiscreteDataset& ds,
                        const SlfsConfig& cfg) {
  const auto order = arrival_order(ds, cfg);
  std::string out = "arrival,feature_id,feature_name,j\n";
  for (std::size_t i = 0; i < res.j_trace.size(); ++i) {
    const std::int32_t f = order[i];
    out += std::to_string(i) + "," + std::to_string(f) + "," +
           csv_escape(ds.feature_names[static_cast<std::size_t>(f)]) + "," +
           format_double(res.j_trace[i]) + "\n";
  }
  return out;
}

void cmd_select(const CommonOpts& c, const EngineOpts& e, bool dot_only) {
  const SlfsConfig cfg = make_engine_config(e);
  const RawTable table = load_table(c);
  const auto codes = class_codes_of(table);
  const auto cuts = discretize_all(table, codes);
  const DiscreteDataset ds = encode(table, cuts);

  const SelectionResult res = run_slfs(ds, cfg);

  json config = common_json(c);
  config.update(engine_json(e));

  const std::string dot = res.tbn.to_dot(ds.feature_names, "Y");
  if (dot_only) {
    write_out(c, "tbn.dot", dot);
    write_manifest(c, "export-dot", config, cfg.shuffle_seed, {"tbn.dot"},
                   {{"total_s", res.timing.total_s}});
  } else {
    write_out(c, "selection.json", selection_to_json(res, ds).dump(2) + "\n");
    write_out(c, "j_trace.csv", j_trace_csv(res, ds, cfg));
    write_out(c, "tbn.dot", dot);
    write_manifest(c, "select", config, cfg.shuffle_seed,
                   {"selection.json", "j_trace.csv", "tbn.dot"},
                   {{"irrelevance_s", res.timing.irrelevance_s},
                    {"search_s", res.timing.search_s},
                    {"trace_s", res.timing.trace_s},
                    {"total_s", res.timing.total_s}});
  }
  std::cout << "selected " << res.selected.size() << " of " << ds.n_features()
            << " features (" << res.rejected.size() << " rejected, "
            << res.swap_count << " swaps)\n";
}

void cmd_train(const CommonOpts& c, const EngineOpts& e, const TrainOpts& t) {
  const SlfsConfig cfg = make_engine_config(e);
  CptMode mode;
  if (t.cpt_mode == "tree") {
    mode = CptMode::TreeFactorization;
  } else if (t.cpt_mode == "class-augmented") {
    mode = CptMode::ClassAugmented;
  } else {
    throw ConfigError("unknown --cpt-mode \"" + t.cpt_mode +
                      "\" (expected tree or class-augmented)");
  }
  if (t.alpha < 0.0) throw ConfigError("--alpha must be >= 0");

  const RawTable table = load_table(c);
  const auto codes = class_codes_of(table);
  const auto cuts = discretize_all(table, codes);
  const Encoder enc = Encoder::fit(table, cuts);
  const DiscreteDataset ds = enc.apply(table);

  const SelectionResult res = run_slfs(ds, cfg);
  const CptModel model = fit_cpts(res.tbn, ds, t.alpha, mode);

  json doc;
  doc["encoder"] = json::parse(enc.to_json_string());
  doc["cpts"] = json::parse(model.to_json_string());
  write_out(c, "model.json", doc.dump(2) + "\n");

  json config = common_json(c);
  config.update(engine_json(e));
  config["alpha"] = t.alpha;
  config["cpt_mode"] = t.cpt_mode;
  write_manifest(c, "train", config, cfg.shuffle_seed, {"model.json"},
                 {{"total_s", res.timing.total_s}});
  std::cout << "trained on " << res.selected.size() << " selected features\n";
}

void cmd_predict(const CommonOpts& c, const std::string& model_path) {
  if (model_path.empty()) throw ConfigError("--model is required");
  json doc;
  try {
    doc = json::parse(read_file(model_path));
  } catch (const json::exception& ex) {
    throw SchemaError(std::string("model file: ") + ex.what());
  }
  if (!doc.contains("encoder") || !doc.contains("cpts"))
    throw SchemaError("model file lacks encoder/cpts sections");
  const Encoder enc = Encoder::from_json_string(doc.at("encoder").dump());
  const CptModel model = CptModel::from_json_string(doc.at("cpts").dump());

  // The training schema drives loading: label column name and column kinds
  // come from the encoder, so predict needs no type flags of its own.
  CommonOpts cc = c;
  const json enc_doc = json::parse(enc.to_json_string());
  if (cc.class_column.empty())
    cc.class_column = enc_doc.at("class").at("name").get<std::string>();
  std::vector<std::string> cat_names;
  for (const auto& jc : enc_doc.at("columns"))
    if (jc.at("kind").get<std::string>() == "categorical")
      cat_names.push_back(jc.at("name").get<std::string>());
  cc.categorical.clear();
  for (std::size_t i = 0; i < cat_names.size(); ++i)
    cc.categorical += (i ? "," : "") + cat_names[i];
  const RawTable table = load_table(cc);
  const DiscreteDataset ds = enc.apply(table);

  const auto& labels = enc.class_labels();
  std::string csv = "row,label";
  for (const auto& l : labels) csv += ",p_" + csv_escape(l);
  csv += "\n";

  std::vector<std::int32_t> row(static_cast<std::size_t>(ds.n_features()), 0);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (std::size_t f = 0; f < row.size(); ++f) row[f] = ds.features[f][r];
    const Prediction p = predict(model, row);
    if (p.label == ds.class_codes[r]) ++correct;
    csv += std::to_string(r) + "," + csv_escape(labels[static_cast<std::size_t>(p.label)]);
    for (double q : p.posterior) csv += "," + format_double(q);
    csv += "\n";
  }
  write_out(c, "predictions.csv", csv);

  json config = common_json(c);
  config["model"] = model_path;
  write_manifest(c, "predict", config, 0, {"predictions.csv"}, {});
  std::cout << "accuracy " << format_double(static_cast<double>(correct) /
                                            static_cast<double>(ds.n_rows()))
            << " over " << ds.n_rows() << " rows\n";
}

SelectorConfig parse_selector(const std::string& name, const SlfsConfig& slfs_cfg) {
  SelectorConfig s;
  s.slfs = slfs_cfg;
  if (name == "slfs") s.kind = SelectorConfig::Kind::Slfs;
  else if (name == "mrmr") s.kind = SelectorConfig::Kind::Mrmr;
  else if (name == "chi2") s.kind = SelectorConfig::Kind::Chi2;
  else if (name == "none") s.kind = SelectorConfig::Kind::None;
  else throw ConfigError("unknown selector \"" + name + "\"");
  return s;
}

ClassifierConfig parse_classifier(const std::string& name, double alpha) {
  ClassifierConfig c;
  c.alpha = alpha;
  if (name == "knn3" || name == "knn5" || name == "knn7") {
    c.kind = ClassifierConfig::Kind::Knn;
    c.k = name[3] - '0';
  } else if (name == "nb") {
    c.kind = ClassifierConfig::Kind::NaiveBayes;
  } else if (name == "bnslfs") {
    c.kind = ClassifierConfig::Kind::Bnslfs;
  } else if (name == "majority") {
    c.kind = ClassifierConfig::Kind::Majority;
  } else {
    throw ConfigError("unknown classifier \"" + name + "\"");
  }
  return c;
}

void cmd_benchmark(const CommonOpts& c, const EngineOpts& e, const BenchOpts& b,
                   const TrainOpts& t) {
  const SlfsConfig cfg = make_engine_config(e);
  const RawTable table = load_table(c);
  const auto codes = class_codes_of(table);
  const FoldPlan plan = make_fold_plan(codes, b.folds, b.seed);

  const std::string dataset_name =
      b.dataset_name.empty() ? std::filesystem::path(c.data).stem().string()
                             : b.dataset_name;

  const auto selector_names = split_list(b.selectors);
  const auto classifier_names = split_list(b.classifiers);
  if (selector_names.empty() || classifier_names.empty())
    throw ConfigError("--selectors and --classifiers must be nonempty");

  BenchmarkReport report;
  double wall_total = 0.0;
  for (const auto& sn : selector_names) {
    const SelectorConfig sel = parse_selector(sn, cfg);
    for (const auto& cn : classifier_names) {
      const ClassifierConfig cls = parse_classifier(cn, t.alpha);
      if (cls.kind == ClassifierConfig::Kind::Bnslfs &&
          sel.kind != SelectorConfig::Kind::Slfs)
        continue;  // bnslfs needs the learned tree; skip other pairings
      const CvResult cv = cross_validate(table, sel, cls, plan, b.jobs);
      wall_total += cv.wall_s;
      for (std::int32_t f = 0; f < plan.k; ++f) {
        report.rows.push_back({dataset_name, sel.name(), cls.name(), f,
                               cv.fold_accuracies[static_cast<std::size_t>(f)],
                               cv.fold_selected_counts[static_cast<std::size_t>(f)],
                               0.0});
      }
      for (const auto& w : cv.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << dataset_name << " " << sel.name() << " x " << cls.name()
                << ": mean " << format_double(cv.mean_accuracy) << " sd "
                << format_double(cv.std_accuracy) << "\n";
    }
  }

  write_out(c, "benchmark.csv", report.to_csv());
  write_out(c, "benchmark.json", report.to_json_string() + "\n");

  json config = common_json(c);
  config.update(engine_json(e));
  config["folds"] = b.folds;
  config["seed"] = b.seed;
  config["jobs"] = b.jobs;
  config["selectors"] = b.selectors;
  config["classifiers"] = b.classifiers;
  config["dataset_name"] = dataset_name;
  config["alpha"] = t.alpha;
  write_manifest(c, "benchmark", config, b.seed, {"benchmark.csv", "benchmark.json"},
                 {{"total_s", wall_total}});
}

int cmd_rerun(const std::string& manifest_path, const std::string& out_dir, bool verify);

int dispatch(const std::string& command, const json& config, const std::string& out_dir);

// Re-execute the command recorded in a manifest. With --verify, compare the
// fresh outputs byte-for-byte against the files beside the manifest.
int cmd_rerun(const std::string& manifest_path, const std::string& out_dir, bool verify) {
  const RunManifest m = RunManifest::from_json_string(read_file(manifest_path));
  json config;
  try {
    config = json::parse(m.config_json.empty() ? "null" : m.config_json);
  } catch (const json::exception& ex) {
    throw SchemaError(std::string("manifest config: ") + ex.what());
  }
  if (!m.data_path.empty()) {
    const std::string now = file_checksum(m.data_path);
    if (now != m.data_checksum)
      throw DataError("data file " + m.data_path + " changed since the recorded run (" +
                      now + " != " + m.data_checksum + ")");
  }

  const int rc = dispatch(m.command, config, out_dir);
  if (rc != kExitOk || !verify) return rc;

  const auto base = std::filesystem::path(manifest_path).parent_path();
  bool all_equal = true;
  for (const auto& name : m.outputs) {
    const std::string fresh = read_file((std::filesystem::path(out_dir) / name).string());
    const std::string old = read_file((base / name).string());
    const bool same = fresh == old;
    std::cout << name << ": " << (same ? "identical" : "DIFFERS") << "\n";
    all_equal = all_equal && same;
  }
  return all_equal ? kExitOk : 1;
}

// Rebuilds option structs from a manifest config snapshot and runs the command.
int dispatch(const std::string& command, const json& config, const std::string& out_dir) {
  CommonOpts c;
  EngineOpts e;
  BenchOpts b;
  TrainOpts t;
  auto get = [&](const char* key, auto& target) {
    if (config.is_object() && config.contains(key))
      target = config.at(key).get<std::decay_t<decltype(target)>>();
  };
  get("data", c.data);
  get("class", c.class_column);
  get("missing_policy", c.missing_policy);
  get("delimiter", c.delimiter);
  get("missing_marker", c.missing_marker);
  get("categorical", c.categorical);
  get("lambda", e.lambda);
  get("max_depth", e.max_depth);
  get("nch", e.nch);
  get("epsilon", e.epsilon);
  get("irrelevance_mode", e.irrelevance_mode);
  get("order", e.order);
  get("folds", b.folds);
  get("seed", b.seed);
  get("jobs", b.jobs);
  get("selectors", b.selectors);
  get("classifiers", b.classifiers);
  get("dataset_name", b.dataset_name);
  get("alpha", t.alpha);
  get("cpt_mode", t.cpt_mode);
  c.out_dir = out_dir;

  if (command == "discretize") {
    cmd_discretize(c);
  } else if (command == "select") {
    cmd_select(c, e, false);
  } else if (command == "export-dot") {
    cmd_select(c, e, true);
  } else if (command == "train") {
    cmd_train(c, e, t);
  } else if (command == "predict") {
    std::string model;
    get("model", model);
    cmd_predict(c, model);
  } else if (command == "benchmark") {
    cmd_benchmark(c, e, b, t);
  } else {
    throw ConfigError("manifest names unknown command \"" + command + "\"");
  }
  return kExitOk;
}

void add_common_flags(CLI::App* app, CommonOpts& c) {
  app->add_option("--data", c.data, "input CSV path");
  app->add_option("--class", c.class_column, "class column name or 0-based index");
  app->add_option("--out-dir", c.out_dir, "output directory");
  app->add_option("--missing-policy", c.missing_policy, "impute | drop-rows");
  app->add_option("--delimiter", c.delimiter, "CSV field delimiter");
  app->add_option("--missing-marker", c.missing_marker, "cell text treated as missing");
  app->add_option("--categorical", c.categorical,
                  "comma list of columns to load as categories (never discretized)");
}

void add_engine_flags(CLI::App* app, EngineOpts& e) {
  app->add_option("--lambda", e.lambda, "class-relevance weight (> 0)");
  app->add_option("--max-depth", e.max_depth, "tree depth cap (>= 1)");
  app->add_option("--nch", e.nch, "children cap per node (>= 1)");
  app->add_option("--epsilon", e.epsilon, "irrelevance threshold in bits (>= 0)");
  app->add_option("--irrelevance-mode", e.irrelevance_mode,
                  "mi-zero | criterion-deltas");
  app->add_option("--order", e.order, "feature arrival order: column | shuffle:SEED");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tree-structured feature selection toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON file of defaults; flags override")
      ->expected(1);

  CommonOpts c;
  EngineOpts e;
  BenchOpts b;
  TrainOpts t;
  std::string model_path;
  std::string manifest_path;
  bool verify = false;

  CLI::App* sc_discretize = app.add_subcommand("discretize", "fit cut points per numeric column");
  add_common_flags(sc_discretize, c);

  CLI::App* sc_select = app.add_subcommand("select", "learn the tree and the feature subset");
  add_common_flags(sc_select, c);
  add_engine_flags(sc_select, e);

  CLI::App* sc_train = app.add_subcommand("train", "select features and fit the tree classifier");
  add_common_flags(sc_train, c);
  add_engine_flags(sc_train, e);
  sc_train->add_option("--alpha", t.alpha, "CPT smoothing (>= 0)");
  sc_train->add_option("--cpt-mode", t.cpt_mode, "tree | class-augmented");

  CLI::App* sc_predict = app.add_subcommand("predict", "classify rows with a trained model");
  add_common_flags(sc_predict, c);
  sc_predict->add_option("--model", model_path, "model.json from train");

  CLI::App* sc_benchmark = app.add_subcommand("benchmark", "cross-validated selector x classifier matrix");
  add_common_flags(sc_benchmark, c);
  add_engine_flags(sc_benchmark, e);
  sc_benchmark->add_option("--folds", b.folds, "fold count (>= 2)");
  sc_benchmark->add_option("--seed", b.seed, "fold assignment seed");
  sc_benchmark->add_option("--jobs", b.jobs, "parallel folds");
  sc_benchmark->add_option("--selectors", b.selectors, "comma list: slfs,mrmr,chi2,none");
  sc_benchmark->add_option("--classifiers", b.classifiers,
                           "comma list: knn3,knn5,knn7,nb,bnslfs,majority");
  sc_benchmark->add_option("--dataset-name", b.dataset_name, "report label (default: file stem)");
  sc_benchmark->add_option("--alpha", t.alpha, "smoothing for nb/bnslfs");

  CLI::App* sc_dot = app.add_subcommand("export-dot", "write only the learned tree as DOT");
  add_common_flags(sc_dot, c);
  add_engine_flags(sc_dot, e);

  CLI::App* sc_rerun = app.add_subcommand("rerun", "repeat a run from its manifest");
  sc_rerun->add_option("--manifest", manifest_path, "manifest.json of the original run")
      ->required();
  sc_rerun->add_option("--out-dir", c.out_dir, "directory for the fresh outputs");
  sc_rerun->add_flag("--verify", verify, "byte-compare fresh outputs with the originals");

  // Lets --config appear after the subcommand name.
  for (CLI::App* sc : app.get_subcommands(nullptr)) sc->fallthrough();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
      // CLI11 prints help itself for -h; everything else is a usage error.
      const int rc = app.exit(ex);
      return rc == 0 ? kExitOk : kExitBadArgs;
    }

    if (!config_path.empty()) apply_config_file(config_path, c, e, b, t);
    // Flags override the config file: re-parse so explicit flags win.
    try {
      app.clear();
      app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
      const int rc = app.exit(ex);
      return rc == 0 ? kExitOk : kExitBadArgs;
    }

    if (sc_discretize->parsed()) {
      cmd_discretize(c);
    } else if (sc_select->parsed()) {
      cmd_select(c, e, false);
    } else if (sc_train->parsed()) {
      cmd_train(c, e, t);
    } else if (sc_predict->parsed()) {
      cmd_predict(c, model_path);
    } else if (sc_benchmark->parsed()) {
      cmd_benchmark(c, e, b, t);
    } else if (sc_dot->parsed()) {
      cmd_select(c, e, true);
    } else if (sc_rerun->parsed()) {
      return cmd_rerun(manifest_path, c.out_dir, verify);
    }
    return kExitOk;
  } catch (const ConfigError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitBadArgs;
  } catch (const SchemaError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitSchemaError;
  } catch (const DataError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}
