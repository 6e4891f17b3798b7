#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "burnout/matrix.hpp"

namespace burnout::models {

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;  // kLeaf marks a leaf
  double threshold = 0.0;        // go left iff x[feature] <= threshold
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double value = 0.0;            // leaf mean; node mean for internal nodes

  bool is_leaf() const noexcept { return feature == kLeaf; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Flat binary regression tree; nodes[0] is the root.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  std::size_t depth() const;
  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

inline constexpr std::size_t kUnlimitedDepth = std::numeric_limits<std::uint32_t>::max();

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 16;
  std::size_t min_samples_leaf = 2;
  std::optional<std::size_t> max_features;  // default max(1, d / 3)
  std::uint64_t seed = 0;
  bool bootstrap = true;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct ForestModel {
  std::vector<RegressionTree> trees;
  std::size_t n_trees = 0;
  std::size_t max_depth = 0;
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 1;
  std::size_t n_features = 0;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double child_sse = 0.0;  // summed squared deviation of both children
};

// Relative tolerance under which two split scores count as tied.
inline constexpr double kSplitTieTolerance = 1e-10;

// Minimizes the summed child squared error over the candidate features and the
// midpoints between consecutive distinct values. Ties prefer the lower feature
// index, then the lower threshold. Empty when no split leaves min_samples_leaf
// rows on both sides or the targets are all equal.
std::optional<Split> best_split(const Matrix& features, std::span<const double> targets,
                                std::span<const std::size_t> candidate_features, std::size_t min_samples_leaf);

ForestModel train_forest(const Matrix& features, std::span<const double> targets, const ForestParams& params);

double predict_forest(const ForestModel& model, std::span<const double> x);

}  // namespace burnout::models
