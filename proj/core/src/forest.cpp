#include "burnout/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "burnout/error.hpp"
#include "burnout/rng.hpp"

namespace burnout::models {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct NodeStats {
  double mean = 0.0;
  double sse = 0.0;
  bool pure = true;
};

NodeStats node_stats(std::span<const double> y, std::span<const std::size_t> rows) {
  NodeStats s;
  double sum = 0.0;
  for (auto r : rows) {
    sum += y[r];
    if (y[r] != y[rows.front()]) s.pure = false;
  }
  s.mean = sum / static_cast<double>(rows.size());
  for (auto r : rows) s.sse += (y[r] - s.mean) * (y[r] - s.mean);
  return s;
}

// Split search over a subset of rows. Targets are centred on the node mean before
// accumulating so the prefix-sum variance formula keeps its precision.
std::optional<Split> find_split(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidates, std::size_t min_leaf,
                                std::vector<std::pair<double, double>>& scratch) {
  const std::size_t m = rows.size();
  if (min_leaf == 0) min_leaf = 1;
  if (m < 2 * min_leaf) return std::nullopt;
  const NodeStats stats = node_stats(y, rows);
  if (stats.pure) return std::nullopt;
  const double tie = kSplitTieTolerance * stats.sse;

  std::optional<Split> best;
  scratch.resize(m);
  for (std::size_t f : candidates) {
    for (std::size_t i = 0; i < m; ++i) scratch[i] = {x(rows[i], f), y[rows[i]] - stats.mean};
    std::sort(scratch.begin(), scratch.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double total = 0.0, total_sq = 0.0;
    for (const auto& [v, t] : scratch) {
      total += t;
      total_sq += t * t;
    }
    double left = 0.0, left_sq = 0.0;
    for (std::size_t s = 0; s + 1 < m; ++s) {
      left += scratch[s].second;
      left_sq += scratch[s].second * scratch[s].second;
      const std::size_t n_left = s + 1;
      const std::size_t n_right = m - n_left;
      if (n_left < min_leaf) continue;
      if (n_right < min_leaf) break;
      const double lo = scratch[s].first;
      const double hi = scratch[s + 1].first;
      if (!(lo < hi)) continue;
      const double right = total - left;
      const double right_sq = total_sq - left_sq;
      const double score = std::max(0.0, left_sq - left * left / static_cast<double>(n_left)) +
                           std::max(0.0, right_sq - right * right / static_cast<double>(n_right));
      if (!best || score < best->child_sse - tie) {
        double threshold = 0.5 * (lo + hi);
        if (!(threshold < hi)) threshold = lo;
        best = Split{f, threshold, score};
      }
    }
  }
  return best;
}

RegressionTree grow_tree(const Matrix& x, std::span<const double> y, std::vector<std::size_t> rows,
                         const ForestParams& params, std::size_t max_features, Rng& rng) {
  struct Pending {
    std::uint32_t node;
    std::vector<std::size_t> rows;
    std::size_t depth;
  };

  const std::size_t d = x.cols();
  RegressionTree tree;
  tree.nodes.emplace_back();
  std::vector<Pending> stack;
  stack.push_back({0, std::move(rows), 0});
  std::vector<std::pair<double, double>> scratch;
  std::vector<std::size_t> features(d);

  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();
    const NodeStats stats = node_stats(y, job.rows);
    tree.nodes[job.node].value = stats.mean;
    if (job.depth >= params.max_depth || stats.pure) continue;

    // Uniform subset of max_features columns, scanned in ascending order.
    std::iota(features.begin(), features.end(), std::size_t{0});
    for (std::size_t i = 0; i < max_features; ++i) {
      std::swap(features[i], features[i + rng.below(d - i)]);
    }
    std::vector<std::size_t> candidates(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(max_features));
    std::sort(candidates.begin(), candidates.end());

    const auto split = find_split(x, y, job.rows, candidates, params.min_samples_leaf, scratch);
    if (!split) continue;

    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : job.rows) {
      (x(r, split->feature) <= split->threshold ? left_rows : right_rows).push_back(r);
    }
    const auto left = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[job.node];
    node.feature = static_cast<std::int32_t>(split->feature);
    node.threshold = split->threshold;
    node.left = left;
    node.right = left + 1;
    stack.push_back({left + 1, std::move(right_rows), job.depth + 1});
    stack.push_back({left, std::move(left_rows), job.depth + 1});
  }
  return tree;
}

}  // namespace

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[i].value;
}

std::size_t RegressionTree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, depth] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, depth);
    if (!nodes[i].is_leaf()) {
      stack.emplace_back(nodes[i].left, depth + 1);
      stack.emplace_back(nodes[i].right, depth + 1);
    }
  }
  return deepest;
}

void ForestModel::validate() const {
  if (trees.empty()) throw FormatError("trees: forest has no trees");
  if (trees.size() != n_trees) throw FormatError("n_trees: does not match the number of stored trees");
  if (n_features == 0) throw FormatError("n_features: must be > 0");
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const auto& nodes = trees[t].nodes;
    const std::string where = "trees[" + std::to_string(t) + "]";
    if (nodes.empty()) throw FormatError(where + ": empty tree");
    // Every node but the root must be referenced exactly once, by an earlier node.
    std::vector<int> parents(nodes.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      if (!std::isfinite(n.value)) throw FormatError(where + ".nodes[" + std::to_string(i) + "].value: non-finite");
      if (n.is_leaf()) continue;
      if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= n_features) {
        throw FormatError(where + ".nodes[" + std::to_string(i) + "].feature: out of range");
      }
      if (!std::isfinite(n.threshold)) {
        throw FormatError(where + ".nodes[" + std::to_string(i) + "].threshold: non-finite");
      }
      for (auto child : {n.left, n.right}) {
        if (child <= i || child >= nodes.size()) {
          throw FormatError(where + ".nodes[" + std::to_string(i) + "]: child index out of range");
        }
        ++parents[child];
      }
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      if (parents[i] != 1) throw FormatError(where + ".nodes[" + std::to_string(i) + "]: unreachable or shared");
    }
    if (trees[t].depth() > max_depth) throw FormatError(where + ": deeper than max_depth");
  }
}

std::optional<Split> best_split(const Matrix& features, std::span<const double> targets,
                                std::span<const std::size_t> candidate_features, std::size_t min_samples_leaf) {
  if (features.rows() != targets.size()) throw DomainError("best_split: features and targets differ in length");
  if (features.rows() == 0) return std::nullopt;
  std::vector<std::size_t> candidates(candidate_features.begin(), candidate_features.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (auto f : candidates) {
    if (f >= features.cols()) throw DomainError("best_split: candidate feature out of range");
  }
  std::vector<std::size_t> rows(features.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<std::pair<double, double>> scratch;
  return find_split(features, targets, rows, candidates, min_samples_leaf, scratch);
}

ForestModel train_forest(const Matrix& features, std::span<const double> targets, const ForestParams& params) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (n == 0 || d == 0) throw DomainError("train_forest: empty training set");
  if (n != targets.size()) throw DomainError("train_forest: features and targets differ in length");
  if (params.n_trees == 0) throw ValidationError("n_trees", "must be > 0");
  if (params.max_depth == 0) throw ValidationError("max_depth", "must be > 0");
  if (params.min_samples_leaf == 0) throw ValidationError("min_samples_leaf", "must be > 0");
  const std::size_t max_features = params.max_features.value_or(std::max<std::size_t>(1, d / 3));
  if (max_features == 0 || max_features > d) throw ValidationError("max_features", "must be in [1, d]");

  ForestModel model;
  model.n_trees = params.n_trees;
  model.max_depth = params.max_depth;
  model.min_samples_leaf = params.min_samples_leaf;
  model.max_features = max_features;
  model.n_features = d;
  model.seed = params.seed;
  model.trees.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(splitmix64(params.seed ^ splitmix64(t)));
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      for (auto& r : rows) r = rng.below(n);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    model.trees.push_back(grow_tree(features, targets, std::move(rows), params, max_features, rng));
  }
  return model;
}

double predict_forest(const ForestModel& model, std::span<const double> x) {
  if (x.size() != model.n_features) throw DomainError("predict_forest: dimension mismatch");
  if (model.trees.empty()) throw DomainError("predict_forest: empty forest");
  double sum = 0.0;
  for (const auto& tree : model.trees) sum += tree.predict(x);
  return sum / static_cast<double>(model.trees.size());
}

}  // namespace burnout::models
