#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "ucmab/core.hpp"
#include "ucmab/random.hpp"

namespace ucmab {

/// One randomized-trial record.
struct LabeledExample {
  ContextPoint x;
  Treatment arm = Treatment::control;
  Outcome y;
};

/// What a tree estimates in its leaves.
enum class TreeTarget {
  uplift,    // responders1/n1 - responders0/n0
  response,  // responders/n over all rows, arm ignored (two-model building block)
};

struct TreeParams {
  std::size_t max_depth = 8;
  /// Minimum per-arm count in every leaf (total count for response trees).
  std::size_t min_group = 5;
  /// Candidate features drawn per split; 0 means all features.
  std::size_t features_per_split = 0;
  TreeTarget target = TreeTarget::uplift;
};

/// Per-arm observation and responder counts.
struct ArmCounts {
  std::array<std::size_t, 2> n{0, 0};
  std::array<std::size_t, 2> responders{0, 0};

  std::size_t total() const noexcept { return n[0] + n[1]; }
  double rate(Treatment arm) const;
  double uplift() const { return rate(Treatment::treated) - rate(Treatment::control); }
  double pooled_rate() const;
};

/// Binary tree with axis-aligned splits. A row goes left iff x[feature] <= split.
class UpliftTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double split = 0.0;
    int left = -1;
    int right = -1;
    ArmCounts counts;
    double value = 0.0;  // leaf estimate (uplift or response rate)

    bool is_leaf() const noexcept { return feature < 0; }
  };

  UpliftTree() = default;
  /// Hand-assembled tree; node 0 is the root. Throws DomainError on bad links.
  explicit UpliftTree(std::vector<Node> nodes);

  double predict(const ContextPoint& x) const;
  const Node& leaf_for(const ContextPoint& x) const;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t leaf_count() const;
  std::size_t depth() const;

  nlohmann::json to_json() const;

  friend bool operator==(const UpliftTree&, const UpliftTree&);

 private:
  friend UpliftTree fit_tree(std::span<const LabeledExample>, const TreeParams&, Rng*);
  std::vector<Node> nodes_;
};

bool operator==(const UpliftTree::Node& a, const UpliftTree::Node& b);

/// Greedy recursive partitioning. Each split maximizes the squared
/// divergence of the children's estimates from the parent's,
///   w_L (v_L - v_P)^2 + w_R (v_R - v_P)^2,   w = child row fraction,
/// subject to the min_group constraint in both children. Growth stops at
/// max_depth, when no admissible split exists, or when the best gain is <= 0.
///
/// `feature_rng` is required when params.features_per_split is non-zero.
/// Throws FitError if the data cannot support a root leaf (for uplift
/// trees: an arm is missing or below min_group).
UpliftTree fit_tree(std::span<const LabeledExample> data, const TreeParams& params, Rng* feature_rng = nullptr);

struct ForestParams {
  std::size_t n_trees = 50;
  TreeParams tree{};
  /// Arm-stratified bootstrap per tree; off means every tree sees the data as is.
  bool bootstrap = true;
  /// Draw floor(sqrt(n_features)) candidates per split unless tree.features_per_split is set.
  bool subsample_features = true;
};

/// Mean of member trees' leaf estimates.
class UpliftForest {
 public:
  UpliftForest() = default;
  UpliftForest(std::vector<UpliftTree> trees, std::vector<std::uint64_t> seeds = {});

  bool fitted() const noexcept { return !trees_.empty(); }
  const std::vector<UpliftTree>& trees() const noexcept { return trees_; }
  const std::vector<std::uint64_t>& seeds() const noexcept { return seeds_; }

  nlohmann::json to_json() const;

  friend bool operator==(const UpliftForest&, const UpliftForest&) = default;

 private:
  std::vector<UpliftTree> trees_;
  std::vector<std::uint64_t> seeds_;
};

/// Deterministic for a fixed seed; each tree draws from its own derived seed.
UpliftForest fit_forest(std::span<const LabeledExample> data, const ForestParams& params, std::uint64_t seed);

/// Mean member-tree estimate at x. Throws StateError on an unfitted forest.
double predict_uplift(const UpliftForest& model, const ContextPoint& x);

/// Uplift as the difference of two response forests, one fitted per arm.
class TwoModelEstimator {
 public:
  static TwoModelEstimator fit(std::span<const LabeledExample> data, ForestParams params, std::uint64_t seed);

  double predict(const ContextPoint& x) const;

  const UpliftForest& treated_model() const noexcept { return treated_; }
  const UpliftForest& control_model() const noexcept { return control_; }

 private:
  UpliftForest treated_;
  UpliftForest control_;
};

}  // namespace ucmab
