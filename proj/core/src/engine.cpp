#include "slfs/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "slfs/errors.hpp"
#include "slfs/rng.hpp"

namespace slfs {

namespace {

constexpr double kSwapTieBand = 1e-9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void SlfsConfig::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
  if (max_depth < 1) throw ConfigError("max-depth must be >= 1");
  if (nch < 1) throw ConfigError("nch must be >= 1");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
}

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::Irrelevant: return "irrelevant";
    case RejectReason::DepthPruned: return "depth_pruned";
  }
  return "unknown";
}

double structure_score(const Tbn& tbn, const InfoEstimator& est, double lambda) {
  double j = 0.0;
  for (auto f : tbn.nodes()) {
    const std::int32_t pa = tbn.parent_of(f);
    const double ify = est.mutual_info(f, kClassCol);
    if (pa == Tbn::kClassNode) {
      j += (ify - est.entropy(f)) + lambda * ify;
    } else {
      j += (est.mutual_info(f, pa) - est.entropy(f)) +
           lambda * (ify - est.cond_mutual_info(f, kClassCol, pa));
    }
  }
  return j;
}

double attach_score(std::int32_t f, std::int32_t candidate, const InfoEstimator& est) {
  return est.mutual_info(f, candidate) - est.cond_mutual_info(f, kClassCol, candidate);
}

std::optional<std::int32_t> best_parent(std::int32_t f,
                                        std::span<const std::int32_t> candidates,
                                        const Tbn& tbn, const InfoEstimator& est) {
  std::optional<std::int32_t> best;
  double best_score = 0.0;
  for (auto c : candidates) {
    if (tbn.at_child_capacity(c)) continue;
    const double s = attach_score(f, c, est);
    if (!best || s > best_score || (s == best_score && c < *best)) {
      best = c;
      best_score = s;
    }
  }
  return best;
}

bool is_irrelevant(std::int32_t f, const Tbn& tbn, const InfoEstimator& est,
                   const SlfsConfig& cfg) {
  if (cfg.irrelevance_mode == IrrelevanceMode::MiZero)
    return est.mutual_info(f, kClassCol) <= cfg.epsilon;

  // CriterionDeltas: relevant unless adding f under its best candidate would
  // lower both halves of the structure score.
  const bool class_term_negative =
      cfg.lambda * est.mutual_info(f, kClassCol) - est.entropy(f) < 0.0;
  const auto pa = best_parent(f, tbn.children_of(Tbn::kClassNode), tbn, est);
  if (!pa) return class_term_negative;
  const bool parent_term_negative =
      est.mutual_info(f, *pa) -
          cfg.lambda * est.cond_mutual_info(f, kClassCol, *pa) < 0.0;
  return parent_term_negative && class_term_negative;
}

ConnectChoice connect_choice(std::int32_t f, std::optional<std::int32_t> pa,
                             const InfoEstimator& est, double lambda) {
  if (!pa) return ConnectChoice::AttachToClass;
  const double lhs = lambda * est.mutual_info(f, kClassCol) - est.entropy(f);
  const double rhs = est.mutual_info(f, *pa) -
                     lambda * est.cond_mutual_info(f, kClassCol, *pa);
  return lhs > rhs ? ConnectChoice::AttachToClass : ConnectChoice::Descend;
}

DescendChoice descend_choice(std::int32_t f, std::int32_t fj,
                             std::optional<std::int32_t> fk, const InfoEstimator& est) {
  if (!fk) return DescendChoice::AttachHere;
  return attach_score(f, *fk, est) > attach_score(f, fj, est)
             ? DescendChoice::Continue
             : DescendChoice::AttachHere;
}

SwapDecision swap_check(std::int32_t f, std::int32_t fj, const InfoEstimator& est) {
  SwapDecision d;
  const double m1 = est.mutual_info(f, kClassCol) - est.mutual_info(fj, kClassCol);
  const double m2 = est.cond_mutual_info(f, kClassCol, fj) -
                    est.cond_mutual_info(fj, kClassCol, f);
  d.relevance_clause = m1 > 0.0;
  d.conditional_clause = m2 > 0.0;
  d.tie = std::abs(m1) <= kSwapTieBand || std::abs(m2) <= kSwapTieBand;
  d.do_swap = m1 > kSwapTieBand && m2 > kSwapTieBand;
  return d;
}

std::vector<std::int32_t> arrival_order(const DiscreteDataset& data, const SlfsConfig& cfg) {
  std::vector<std::int32_t> order(static_cast<std::size_t>(data.n_features()));
  std::iota(order.begin(), order.end(), 0);
  if (cfg.arrival_order == ArrivalOrder::Shuffled) {
    std::mt19937_64 rng(cfg.shuffle_seed);
    deterministic_shuffle(order, rng);
  }
  return order;
}

SelectionResult run_slfs(const DiscreteDataset& data, const SlfsConfig& cfg,
                         const EngineHooks& hooks) {
  cfg.validate();
  const auto t_run = Clock::now();

  InfoEstimator est(data, cfg.use_cache);
  SelectionResult res{Tbn(cfg.max_depth, cfg.nch)};
  Tbn& tbn = res.tbn;

  auto mutated = [&] {
    if (hooks.after_mutation) hooks.after_mutation(tbn);
  };
  auto reject = [&](std::int32_t f, RejectReason why,
                    std::vector<std::int32_t> blanket) {
    res.rejected.push_back({f, why, std::move(blanket)});
  };
  // Chain from fj to the class node, nearest first: the selected features
  // that stood between a pruned feature and an attachment slot.
  auto blanket_from = [&](std::int32_t fj) {
    std::vector<std::int32_t> b{fj};
    auto up = tbn.ancestors_of(fj);
    b.insert(b.end(), up.begin(), up.end());
    return b;
  };

  for (const std::int32_t f : arrival_order(data, cfg)) {
    const auto t_feature = Clock::now();
    const bool drop = is_irrelevant(f, tbn, est, cfg);
    res.timing.irrelevance_s += seconds_since(t_feature);

    const auto t_search = Clock::now();
    if (drop) {
      reject(f, RejectReason::Irrelevant, {});
    } else {
      const auto pa = best_parent(f, tbn.children_of(Tbn::kClassNode), tbn, est);
      const bool class_full = tbn.at_child_capacity(Tbn::kClassNode);
      const bool to_class =
          connect_choice(f, pa, est, cfg.lambda) == ConnectChoice::AttachToClass;

      if (to_class && !class_full) {
        tbn.add_edge(Tbn::kClassNode, f);
        mutated();
      } else if (!pa) {
        // Every slot at depth 1 is taken and no child node can accept a
        // descent. The feature has no reachable attachment point.
        reject(f, RejectReason::DepthPruned, {});
      } else {
        // Walk down from pa. The guard runs before each attachment so a
        // feature is never added beyond the depth cap and then removed.
        std::int32_t fj = *pa;
        while (true) {
          if (tbn.depth_of(fj) + 1 > tbn.max_depth_cap()) {
            reject(f, RejectReason::DepthPruned, blanket_from(fj));
            break;
          }
          const auto fk = best_parent(f, tbn.children_of(fj), tbn, est);
          if (descend_choice(f, fj, fk, est) == DescendChoice::AttachHere) {
            tbn.add_edge(fj, f);
            mutated();
            const SwapDecision d = swap_check(f, fj, est);
            if (!d.tie && d.relevance_clause != d.conditional_clause)
              ++res.swap_clause_disagreements;
            if (d.do_swap) {
              SwapEvent ev{f, fj, attach_score(f, fj, est), 0.0, false};
              tbn.swap(f, fj);
              ++res.swap_count;
              ev.post_score = est.mutual_info(f, fj) -
                              est.cond_mutual_info(fj, kClassCol, f);
              ev.stable = !swap_check(fj, f, est).do_swap;
              mutated();
              if (hooks.on_swap) hooks.on_swap(ev);
            }
            break;
          }
          fj = *fk;
        }
      }
    }
    res.timing.search_s += seconds_since(t_search);

    const auto t_trace = Clock::now();
    res.j_trace.push_back(structure_score(tbn, est, cfg.lambda));
    res.timing.trace_s += seconds_since(t_trace);
  }

  res.selected = tbn.nodes();
  res.warnings = tbn.warnings();
  res.cache = est.cache_stats();
  res.timing.total_s = seconds_since(t_run);
  return res;
}

}  // namespace slfs
