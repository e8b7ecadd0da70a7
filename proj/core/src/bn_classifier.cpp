#include "slfs/bn_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "slfs/errors.hpp"

namespace slfs {

namespace {

using json = nlohmann::json;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_or_ninf(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// JSON has no -inf literal, so log arrays serialize -inf as the string
// "-inf" and finite values as numbers (round-trip exact).
json log_array_to_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) {
    if (std::isinf(x))
      a.push_back("-inf");
    else
      a.push_back(x);
  }
  return a;
}

std::vector<double> log_array_from_json(const json& a) {
  std::vector<double> v;
  v.reserve(a.size());
  for (const auto& e : a) {
    if (e.is_string()) {
      if (e.get<std::string>() != "-inf")
        throw SchemaError("model json: unexpected string in log array");
      v.push_back(kNegInf);
    } else {
      v.push_back(e.get<double>());
    }
  }
  return v;
}

std::int32_t clamp_code(std::int32_t code, std::int32_t arity) {
  if (code < 0) return 0;
  if (code >= arity) return arity - 1;
  return code;
}

}  // namespace

CptModel fit_cpts(const Tbn& tbn, const DiscreteDataset& data, double alpha,
                  CptMode mode) {
  if (data.n_rows() == 0) throw DataError("fit_cpts: empty dataset");
  if (alpha < 0.0) throw ConfigError("fit_cpts: alpha must be >= 0");

  const std::size_t n = data.n_rows();
  const std::int32_t nc = data.n_classes;

  CptModel model;
  model.alpha = alpha;
  model.mode = mode;
  model.n_classes = nc;

  std::vector<std::int64_t> class_counts(static_cast<std::size_t>(nc), 0);
  for (auto y : data.class_codes) ++class_counts[static_cast<std::size_t>(y)];
  model.log_prior.reserve(static_cast<std::size_t>(nc));
  for (auto c : class_counts)
    model.log_prior.push_back(log_or_ninf(
        (static_cast<double>(c) + alpha) /
        (static_cast<double>(n) + alpha * static_cast<double>(nc))));

  for (auto f : tbn.nodes()) {
    FeatureCpt cpt;
    cpt.feature = f;
    cpt.parent = tbn.parent_of(f);
    cpt.depth = tbn.depth_of(f);
    cpt.arity = data.arities[static_cast<std::size_t>(f)];

    const auto& col = data.features[static_cast<std::size_t>(f)];
    std::vector<std::int64_t> counts;

    if (cpt.parent == Tbn::kClassNode) {
      cpt.cond_arity = nc;
      counts.assign(static_cast<std::size_t>(nc) * cpt.arity, 0);
      for (std::size_t r = 0; r < n; ++r)
        ++counts[static_cast<std::size_t>(data.class_codes[r]) * cpt.arity + col[r]];
    } else {
      const auto& pcol = data.features[static_cast<std::size_t>(cpt.parent)];
      const std::int32_t pa = data.arities[static_cast<std::size_t>(cpt.parent)];
      if (mode == CptMode::ClassAugmented) {
        cpt.cond_arity = pa * nc;
        counts.assign(static_cast<std::size_t>(cpt.cond_arity) * cpt.arity, 0);
        for (std::size_t r = 0; r < n; ++r) {
          const std::int32_t cond = pcol[r] * nc + data.class_codes[r];
          ++counts[static_cast<std::size_t>(cond) * cpt.arity + col[r]];
        }
      } else {
        cpt.cond_arity = pa;
        counts.assign(static_cast<std::size_t>(pa) * cpt.arity, 0);
        for (std::size_t r = 0; r < n; ++r)
          ++counts[static_cast<std::size_t>(pcol[r]) * cpt.arity + col[r]];
      }
    }

    cpt.log_p.resize(counts.size());
    cpt.log_floor.resize(static_cast<std::size_t>(cpt.cond_arity));
    for (std::int32_t c = 0; c < cpt.cond_arity; ++c) {
      std::int64_t total = 0;
      for (std::int32_t v = 0; v < cpt.arity; ++v)
        total += counts[static_cast<std::size_t>(c) * cpt.arity + v];
      const double denom =
          static_cast<double>(total) + alpha * static_cast<double>(cpt.arity);
      for (std::int32_t v = 0; v < cpt.arity; ++v) {
        const auto idx = static_cast<std::size_t>(c) * cpt.arity + v;
        cpt.log_p[idx] =
            denom > 0.0
                ? log_or_ninf((static_cast<double>(counts[idx]) + alpha) / denom)
                : log_or_ninf(1.0 / static_cast<double>(cpt.arity));
      }
      cpt.log_floor[static_cast<std::size_t>(c)] =
          denom > 0.0 ? log_or_ninf(alpha / denom)
                      : log_or_ninf(1.0 / static_cast<double>(cpt.arity));
    }
    model.cpts.push_back(std::move(cpt));
  }
  return model;
}

Prediction predict(const CptModel& model, std::span<const std::int32_t> row) {
  const std::int32_t nc = model.n_classes;
  if (nc < 1) throw SchemaError("predict: model has no classes");

  std::vector<double> score(model.log_prior);
  for (const auto& cpt : model.cpts) {
    if (cpt.feature < 0 || static_cast<std::size_t>(cpt.feature) >= row.size())
      throw SchemaError("predict: row lacks feature " + std::to_string(cpt.feature));
    const std::int32_t code = row[static_cast<std::size_t>(cpt.feature)];

    if (cpt.parent == Tbn::kClassNode) {
      for (std::int32_t y = 0; y < nc; ++y) {
        const auto base = static_cast<std::size_t>(y) * cpt.arity;
        score[static_cast<std::size_t>(y)] +=
            (code >= 0 && code < cpt.arity)
                ? cpt.log_p[base + code]
                : cpt.log_floor[static_cast<std::size_t>(y)];
      }
    } else if (model.mode == CptMode::ClassAugmented) {
      if (static_cast<std::size_t>(cpt.parent) >= row.size())
        throw SchemaError("predict: row lacks feature " + std::to_string(cpt.parent));
      const std::int32_t pa_arity = cpt.cond_arity / nc;
      const std::int32_t pcode =
          clamp_code(row[static_cast<std::size_t>(cpt.parent)], pa_arity);
      for (std::int32_t y = 0; y < nc; ++y) {
        const std::int32_t cond = pcode * nc + y;
        const auto base = static_cast<std::size_t>(cond) * cpt.arity;
        score[static_cast<std::size_t>(y)] +=
            (code >= 0 && code < cpt.arity)
                ? cpt.log_p[base + code]
                : cpt.log_floor[static_cast<std::size_t>(cond)];
      }
    }
    // Deeper features under the tree factorization: P(f | pa) is constant in
    // the class and cancels out of the posterior.
  }

  Prediction pred;
  pred.posterior.assign(static_cast<std::size_t>(nc), 0.0);
  const double peak = *std::max_element(score.begin(), score.end());
  if (std::isinf(peak)) {  // every class impossible: fall back to uniform
    const double u = 1.0 / static_cast<double>(nc);
    std::fill(pred.posterior.begin(), pred.posterior.end(), u);
    pred.label = 0;
    return pred;
  }
  double total = 0.0;
  for (std::int32_t y = 0; y < nc; ++y) {
    const double e = std::exp(score[static_cast<std::size_t>(y)] - peak);
    pred.posterior[static_cast<std::size_t>(y)] = e;
    total += e;
  }
  for (auto& p : pred.posterior) p /= total;

  pred.label = 0;
  for (std::int32_t y = 1; y < nc; ++y)
    if (score[static_cast<std::size_t>(y)] > score[static_cast<std::size_t>(pred.label)])
      pred.label = y;
  return pred;
}

double evaluate_accuracy(const CptModel& model, const DiscreteDataset& data) {
  if (data.n_rows() == 0) throw DataError("evaluate_accuracy: empty dataset");
  std::vector<std::int32_t> row(static_cast<std::size_t>(data.n_features()), 0);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    for (std::size_t f = 0; f < row.size(); ++f) row[f] = data.features[f][r];
    if (predict(model, row).label == data.class_codes[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.n_rows());
}

// ---------------------------------------------------------------------------
// Serialization

std::string CptModel::to_json_string() const {
  json j;
  j["alpha"] = alpha;
  j["mode"] = mode == CptMode::ClassAugmented ? "class_augmented" : "tree";
  j["n_classes"] = n_classes;
  j["log_prior"] = log_array_to_json(log_prior);
  json arr = json::array();
  for (const auto& c : cpts) {
    json jc;
    jc["feature"] = c.feature;
    jc["parent"] = c.parent;
    jc["depth"] = c.depth;
    jc["arity"] = c.arity;
    jc["cond_arity"] = c.cond_arity;
    jc["log_p"] = log_array_to_json(c.log_p);
    jc["log_floor"] = log_array_to_json(c.log_floor);
    arr.push_back(std::move(jc));
  }
  j["cpts"] = std::move(arr);
  return j.dump(2);
}

CptModel CptModel::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("model json parse error: ") + e.what());
  }
  try {
    CptModel m;
    m.alpha = j.at("alpha").get<double>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "tree") {
      m.mode = CptMode::TreeFactorization;
    } else if (mode == "class_augmented") {
      m.mode = CptMode::ClassAugmented;
    } else {
      throw SchemaError("model json: unknown mode \"" + mode + "\"");
    }
    m.n_classes = j.at("n_classes").get<std::int32_t>();
    m.log_prior = log_array_from_json(j.at("log_prior"));
    for (const auto& jc : j.at("cpts")) {
      FeatureCpt c;
      c.feature = jc.at("feature").get<std::int32_t>();
      c.parent = jc.at("parent").get<std::int32_t>();
      c.depth = jc.at("depth").get<std::int32_t>();
      c.arity = jc.at("arity").get<std::int32_t>();
      c.cond_arity = jc.at("cond_arity").get<std::int32_t>();
      c.log_p = log_array_from_json(jc.at("log_p"));
      c.log_floor = log_array_from_json(jc.at("log_floor"));
      if (c.log_p.size() != static_cast<std::size_t>(c.arity) * c.cond_arity ||
          c.log_floor.size() != static_cast<std::size_t>(c.cond_arity))
        throw SchemaError("model json: cpt shape mismatch for feature " +
                          std::to_string(c.feature));
      m.cpts.push_back(std::move(c));
    }
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("model json missing field: ") + e.what());
  }
}

}  // namespace slfs
