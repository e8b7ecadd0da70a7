#ifndef SLFS_ENGINE_HPP
#define SLFS_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slfs/dataset.hpp"
#include "slfs/info_metrics.hpp"
#include "slfs/tbn.hpp"

// Incremental structure search: each arriving feature is either discarded as
// irrelevant, attached directly under the class node, or walked down the tree
// to the candidate parent that best explains it. A feature whose walk runs
// past the depth cap is pruned; the nodes it walked through are kept as its
// Markov blanket (the already-selected features that render it redundant).
// Features that survive are exactly the relevant, non-redundant ones the
// structure can distinguish at the configured caps.
//
// Every decision is a comparison of information scores. For a feature f and
// candidate parent c the attachment score is I(f;c) - I(f;Y|c): high when c
// explains f and, given c, f says little new about the class.

namespace slfs {

enum class IrrelevanceMode {
  /// Discard f when I(f;Y) <= epsilon. The default: checkable before any
  /// parent exists, which matches the insertion order.
  MiZero,
  /// Discard f when both criterion deltas are negative:
  /// I(f;pa) - lambda*I(f;Y|pa) < 0 and lambda*I(f;Y) - H(f) < 0,
  /// pa being the best candidate among the class node's children. With no
  /// feature nodes yet, only the second inequality is evaluated.
  CriterionDeltas,
};

enum class ArrivalOrder { ColumnOrder, Shuffled };

struct SlfsConfig {
  double lambda = 1.0;     // weight of the class-relevance terms, > 0
  std::int32_t max_depth = 2;
  std::int32_t nch = 15;   // child cap per node
  double epsilon = 0.01;   // irrelevance threshold, bits
  IrrelevanceMode irrelevance_mode = IrrelevanceMode::MiZero;
  ArrivalOrder arrival_order = ArrivalOrder::ColumnOrder;
  std::uint64_t shuffle_seed = 0;
  bool use_cache = true;

  void validate() const;  // throws ConfigError
};

enum class RejectReason { Irrelevant, DepthPruned };

struct RejectedFeature {
  std::int32_t feature;
  RejectReason reason;
  /// Ancestor features at the point of rejection, nearest first. Empty for
  /// irrelevant features, which never touched the tree.
  std::vector<std::int32_t> markov_blanket;
};

struct PhaseTimings {
  double irrelevance_s = 0.0;
  double search_s = 0.0;
  double trace_s = 0.0;
  double total_s = 0.0;
};

struct SelectionResult {
  explicit SelectionResult(Tbn t) : tbn(std::move(t)) {}

  Tbn tbn;
  std::vector<std::int32_t> selected;     // feature ids in the tree, ascending
  std::vector<RejectedFeature> rejected;  // arrival order
  std::vector<double> j_trace;            // structure score after each feature
  PhaseTimings timing;
  std::vector<std::string> warnings;
  CacheStats cache;
  std::uint64_t swap_count = 0;
  std::uint64_t swap_clause_disagreements = 0;
};

/// Emitted when a swap fires. Scores are the edge score of the incoming
/// feature against the displaced parent, before and after restructuring.
struct SwapEvent {
  std::int32_t incoming;
  std::int32_t displaced;
  double pre_score;
  double post_score;
  bool stable;  // re-check in the other direction came back false
};

/// Observation points for tests; both default to no-ops.
struct EngineHooks {
  std::function<void(const Tbn&)> after_mutation;
  std::function<void(const SwapEvent&)> on_swap;
};

/// Structure score of the whole tree:
///   sum_f [I(f;pa(f)) - H(f)] + lambda * sum_f [I(f;Y) - I(f;Y|pa(f))]
/// Depth-1 nodes pair with the class node, so their first bracket uses
/// I(f;Y) and their conditional term is zero. Empty tree scores 0.
double structure_score(const Tbn& tbn, const InfoEstimator& est, double lambda);

bool is_irrelevant(std::int32_t f, const Tbn& tbn, const InfoEstimator& est,
                   const SlfsConfig& cfg);

/// Attachment score used by every parent search.
double attach_score(std::int32_t f, std::int32_t candidate, const InfoEstimator& est);

/// Best candidate parent for f: argmax of attach_score over `candidates`,
/// ties to the smallest feature id. Candidates with a full child list are
/// excluded; returns nullopt when none remain (callers then treat the
/// current node as the attachment point).
std::optional<std::int32_t> best_parent(std::int32_t f,
                                        std::span<const std::int32_t> candidates,
                                        const Tbn& tbn, const InfoEstimator& est);

enum class ConnectChoice { AttachToClass, Descend };

/// Attach f under the class node iff
///   lambda*I(f;Y) - H(f) > I(f;pa) - lambda*I(f;Y|pa)
/// strictly; otherwise descend toward `pa`. With no candidate (empty tree),
/// always AttachToClass.
ConnectChoice connect_choice(std::int32_t f, std::optional<std::int32_t> pa,
                             const InfoEstimator& est, double lambda);

enum class DescendChoice { AttachHere, Continue };

/// Stay at `fj` iff its attachment score strictly beats the best child's;
/// ties attach at the shallower node. Leaf fj (or all children full) always
/// attaches here.
DescendChoice descend_choice(std::int32_t f, std::int32_t fj,
                             std::optional<std::int32_t> fk, const InfoEstimator& est);

struct SwapDecision {
  bool do_swap = false;
  bool relevance_clause = false;    // I(f;Y) > I(fj;Y)
  bool conditional_clause = false;  // I(f;Y|fj) > I(fj;Y|f)
  bool tie = false;                 // either margin within 1e-9: never swap
};

/// Swap test for a freshly attached f against its parent fj. The two clauses
/// are plug-in equivalent through the chain identity; both are evaluated and
/// disagreements outside the tie band are counted by the caller.
SwapDecision swap_check(std::int32_t f, std::int32_t fj, const InfoEstimator& est);

/// Runs the full insertion loop over the dataset features. Deterministic
/// given dataset and config (including the shuffle seed).
SelectionResult run_slfs(const DiscreteDataset& data, const SlfsConfig& cfg,
                         const EngineHooks& hooks = {});

/// Arrival order the engine will use for `data` under `cfg`.
std::vector<std::int32_t> arrival_order(const DiscreteDataset& data, const SlfsConfig& cfg);

const char* to_string(RejectReason r);

}  // namespace slfs

#endif  // SLFS_ENGINE_HPP
