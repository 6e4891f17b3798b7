#include "burnout/knn.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "burnout/error.hpp"

namespace burnout::models {

void KnnModel::validate() const {
  if (train_features.rows() != train_targets.size()) {
    throw FormatError("train_targets: length does not match train_features");
  }
  if (train_features.rows() == 0) throw FormatError("train_features: empty");
  if (k < 1 || k > train_features.rows()) throw FormatError("k: must be in [1, number of training rows]");
}

KnnModel fit_knn(Matrix features, std::vector<double> targets, std::size_t k) {
  if (features.rows() == 0) throw DomainError("fit_knn: empty training set");
  if (features.rows() != targets.size()) throw DomainError("fit_knn: features and targets differ in length");
  if (k < 1 || k > features.rows()) {
    throw ValidationError("k", "must be between 1 and the number of training rows (" +
                                   std::to_string(features.rows()) + ")");
  }
  return KnnModel{std::move(features), std::move(targets), k};
}

double knn_predict(const KnnModel& model, std::span<const double> x) {
  const Matrix& train = model.train_features;
  if (x.size() != train.cols()) throw DomainError("knn_predict: dimension mismatch");
  // Squared distance preserves the Euclidean ordering; pairs compare by index on ties.
  std::vector<std::pair<double, std::size_t>> dist(train.rows());
  for (std::size_t r = 0; r < train.rows(); ++r) {
    const auto row = train.row(r);
    double d2 = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      const double d = row[c] - x[c];
      d2 += d * d;
    }
    dist[r] = {d2, r};
  }
  const std::size_t k = model.k;
  if (k < dist.size()) {
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
  }
  std::sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k));
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += model.train_targets[dist[i].second];
  return sum / static_cast<double>(k);
}

}  // namespace burnout::models
